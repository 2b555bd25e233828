#pragma once

#include "colp/types.hpp"

#include <cmath>
#include <vector>

namespace colp {

enum class map_kind { rotation, shear };

/// Flow of the test Hamiltonian w * mu_{k,i} (0-based particle and component).
struct map_descriptor {
  int particle = 0;
  int component = 0;
  map_kind kind = map_kind::rotation;

  static map_descriptor make(const group_spec& group, int particle, int component);

  friend bool operator==(const map_descriptor&, const map_descriptor&) = default;
};

/// Ordered composition P_K o ... o P_1 applied over the map time `delta_t`.
struct map_schedule {
  std::vector<map_descriptor> maps;
  real delta_t = 0.1;

  /// `passes` sweeps over (k, i), particle-major then component order.
  static map_schedule standard(const group_spec& group, int num_particles, real delta_t, int passes = 1);

  std::size_t size() const { return maps.size(); }
};

void validate(const map_descriptor& desc, const group_spec& group, int num_particles);

// Rotation blocks are R_a(theta) with R_a the rotation about e_a by -theta.
// For the cyclic successors (b, c) of axis a:
//   x_b' =  cos(theta) x_b + sin(theta) x_c
//   x_c' = -sin(theta) x_b + cos(theta) x_c
// Shears add theta * (p x e_a) to Pi:
//   Pi_b += theta p_c,  Pi_c -= theta p_b.

template <class Scalar>
matrix<Scalar, 3, 3> rotation_block(int axis, Scalar theta) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  matrix<Scalar, 3, 3> r = matrix<Scalar, 3, 3>::Identity();
  const Scalar co = std::cos(theta);
  const Scalar si = std::sin(theta);
  r(b, b) = co;
  r(b, c) = si;
  r(c, b) = -si;
  r(c, c) = co;
  return r;
}

/// d/dtheta of rotation_block.
template <class Scalar>
matrix<Scalar, 3, 3> rotation_block_derivative(int axis, Scalar theta) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  matrix<Scalar, 3, 3> r = matrix<Scalar, 3, 3>::Zero();
  const Scalar co = std::cos(theta);
  const Scalar si = std::sin(theta);
  r(b, b) = -si;
  r(b, c) = co;
  r(c, b) = -co;
  r(c, c) = -si;
  return r;
}

/// Generator S of the SE(3) shear: A = I + theta S, with axis in {0, 1, 2}.
template <class Scalar>
matrix<Scalar, 6, 6> shear_generator(int axis) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  matrix<Scalar, 6, 6> s = matrix<Scalar, 6, 6>::Zero();
  s(b, 3 + c) = Scalar(1);
  s(c, 3 + b) = Scalar(-1);
  return s;
}

/// n x n block acting on the descriptor's particle; identity elsewhere.
mat map_matrix(const group_spec& group, const map_descriptor& desc, real w, real t_star);

/// d(map_matrix)/dw.
mat map_matrix_derivative(const group_spec& group, const map_descriptor& desc, real w, real t_star);

phase_state apply_map(const phase_state& state, const map_descriptor& desc, real w, real t_star);

/// (dA/dw) mu, full state-shaped.
vec d_apply_d_w(const phase_state& state, const map_descriptor& desc, real w, real t_star);

namespace detail {

// In-place kernels on a raw particle block `x` (length n), theta = w * t_star.

inline void rotate(real* x, int axis, real co, real si) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  const real xb = x[b];
  const real xc = x[c];
  x[b] = co * xb + si * xc;
  x[c] = -si * xb + co * xc;
}

/// Transposed rotation, used for adjoints.
inline void rotate_transpose(real* x, int axis, real co, real si) { rotate(x, axis, co, -si); }

/// x^T (dR/dtheta) y for the 3-vector rotation about `axis`.
inline real rotation_derivative_form(const real* x, const real* y, int axis, real co, real si) {
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;
  return x[b] * (-si * y[b] + co * y[c]) + x[c] * (-co * y[b] - si * y[c]);
}

inline void apply_block(const group_spec& group, const map_descriptor& desc, real theta, real* x) {
  if (group.kind == group_kind::so3) {
    rotate(x, desc.component, std::cos(theta), std::sin(theta));
  } else if (desc.kind == map_kind::rotation) {
    const real co = std::cos(theta);
    const real si = std::sin(theta);
    rotate(x, desc.component, co, si);
    rotate(x + 3, desc.component, co, si);
  } else {
    const int a = desc.component - 3;
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    const real pb = x[3 + b];
    const real pc = x[3 + c];
    x[b] += theta * pc;
    x[c] -= theta * pb;
  }
}

}  // namespace detail

}  // namespace colp
