#pragma once

#include "colp/types.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace colp {

/// Dense structure constants, gamma(s, i, j) = Γ^s_{ij} with 0-based indices.
class structure_constants {
public:
  explicit structure_constants(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }

  real& operator()(int s, int i, int j) { return data_[index(s, i, j)]; }
  real operator()(int s, int i, int j) const { return data_[index(s, i, j)]; }

private:
  std::size_t index(int s, int i, int j) const { return static_cast<std::size_t>((s * dim_ + i) * dim_ + j); }

  int dim_;
  std::vector<real> data_;
};

structure_constants make_structure_constants(const group_spec& group);

/// Largest |Γ^s_{ij} + Γ^s_{ji}|.
real antisymmetry_residual(const structure_constants& gamma);

/// Largest Jacobi-identity violation over all (i, j, k, r).
real jacobi_residual(const structure_constants& gamma);

/// 3x3 hat matrix: hat(a) * v == a.cross(v).
template <class Derived>
matrix<typename Derived::Scalar, 3, 3> hat3(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  matrix<Scalar, 3, 3> m;
  m << Scalar(0), -a(2), a(1),
       a(2), Scalar(0), -a(0),
       -a(1), a(0), Scalar(0);
  return m;
}

/// One particle's Poisson block before the 1/sqrt(2) factor.
///
/// SO(3): hat(mu_k). SE(3): [[hat(Pi), hat(p)], [hat(p), 0]].
template <class Derived>
matrix<typename Derived::Scalar> hat_block(const group_spec& group, const Eigen::MatrixBase<Derived>& mu_k) {
  using Scalar = typename Derived::Scalar;
  if (mu_k.size() != group.dim) throw dimension_error("hat_block: component count does not match algebra dimension");
  if (group.kind == group_kind::so3) return hat3(mu_k.template head<3>());
  matrix<Scalar> m = matrix<Scalar>::Zero(6, 6);
  m.template topLeftCorner<3, 3>() = hat3(mu_k.template head<3>());
  m.template topRightCorner<3, 3>() = hat3(mu_k.template tail<3>());
  m.template bottomLeftCorner<3, 3>() = hat3(mu_k.template tail<3>());
  return m;
}

/// Block-diagonal Lie-Poisson tensor (1/sqrt 2) diag(hat(mu_1), ..., hat(mu_N)).
mat poisson_tensor(const phase_state& state);

/// Same tensor assembled from structure constants: block_{ab} = -sum_s mu_s Γ^s_{ab}.
mat poisson_tensor_from_structure(const phase_state& state, const structure_constants& gamma);

/// Per-particle Casimir values.
///
/// SO(3): one value c_k = |mu_k|^2. SE(3): C1_k = |p_k|^2 then C2_k = Pi_k . p_k.
struct casimir_report {
  group_spec group;
  int num_particles = 0;
  /// particle-major, casimirs_per_particle() entries per particle
  std::vector<real> values;
  /// natural magnitude of each value, used to form relative deviations
  std::vector<real> scales;

  real value(int particle, int which = 0) const {
    return values[static_cast<std::size_t>(particle * group.casimirs_per_particle() + which)];
  }
};

casimir_report casimirs(const phase_state& state);

/// Analytic gradient of one Casimir with respect to the full state.
vec casimir_gradient(const phase_state& state, int particle, int which);

}  // namespace colp
