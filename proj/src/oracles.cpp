#include "colp/oracles.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

namespace colp::oracles {

vec fd_gradient(const scalar_function& f, const vec& x, const fd_config& config) {
  if (!(config.step > 0.0)) throw error("fd_gradient: step must be positive");
  vec g(x.size());
  vec probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + config.step;
    const real up = f(probe);
    probe(i) = x(i) - config.step;
    const real down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw error("fd_gradient: non-finite evaluation at coordinate " + std::to_string(i));
    g(i) = (up - down) / (2.0 * config.step);
  }
  return g;
}

vec rk4_flow(const vector_field& field, const vec& x0, real t, int steps) {
  if (steps < 1) throw error("rk4_flow: steps must be at least 1");
  const real h = t / steps;
  vec x = x0;
  for (int s = 0; s < steps; ++s) {
    const vec k1 = field(x);
    const vec k2 = field(x + 0.5 * h * k1);
    const vec k3 = field(x + 0.5 * h * k2);
    const vec k4 = field(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw error("rk4_flow: non-finite state at step " + std::to_string(s));
  }
  return x;
}

real order_estimate(real error_h, real error_half) {
  if (!(error_h > 0.0) || !(error_half > 0.0)) throw error("order_estimate: errors must be positive");
  return std::log2(error_h / error_half);
}

real single_particle_reduction_residual(const trajectory& traj) {
  if (traj.group.kind != group_kind::so3 || traj.num_particles != 1)
    throw error("single_particle_reduction_residual: needs a single-particle SO(3) trajectory");
  if (traj.states.size() < 3) throw error("single_particle_reduction_residual: need at least 3 points");
  const real dt2 = traj.dt * traj.dt;
  real worst = 0.0;
  for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
    const real acc = (traj.states[i + 1](0) - 2.0 * traj.states[i](0) + traj.states[i - 1](0)) / dt2;
    const real rhs = 0.5 * traj.states[i](0) * (traj.states[i](1) - 1.0);
    worst = std::max(worst, std::abs(acc - rhs));
  }
  return worst;
}

real explicit_hamiltonian(group_kind group, topology_kind topo, int num_particles, real chi, const vec& mu) {
  const int n = group == group_kind::so3 ? 3 : 6;
  const int drift = group == group_kind::so3 ? 1 : 3;
  const int controls = group == group_kind::so3 ? 1 : 2;
  if (mu.size() != n * num_particles) throw dimension_error("explicit_hamiltonian: wrong state length");
  const real nc = num_particles * chi;
  const real big = 1.0 + 2.0 * nc;
  const real small = 1.0 + 2.0 * chi;
  auto u = [&](int k, int i) { return mu(k * n + i); };

  real h = 0.0;
  for (int k = 0; k < num_particles; ++k) h += u(k, drift);
  real quad = 0.0;
  for (int i = 0; i < controls; ++i) {
    if (topo == topology_kind::democracy) {
      real squares = 0.0;
      real cross = 0.0;
      for (int a = 0; a < num_particles; ++a) {
        squares += u(a, i) * u(a, i);
        for (int b = a + 1; b < num_particles; ++b) cross += u(a, i) * u(b, i);
      }
      quad += small / big * squares + 4.0 * chi / big * cross;
    } else if (topo == topology_kind::dictatorship) {
      real followers = 0.0;
      real follower_sum = 0.0;
      real follower_cross = 0.0;
      for (int a = 1; a < num_particles; ++a) {
        followers += u(a, i) * u(a, i);
        follower_sum += u(a, i);
        for (int b = a + 1; b < num_particles; ++b) follower_cross += u(a, i) * u(b, i);
      }
      quad += small / big * u(0, i) * u(0, i) + (big + 4.0 * chi * chi) / (big * small) * followers +
              4.0 * chi / big * u(0, i) * follower_sum + 8.0 * chi * chi / (big * small) * follower_cross;
    } else {
      throw error("explicit_hamiltonian: no expansion for custom topologies");
    }
  }
  return h + 0.5 * quad;
}

mat brute_force_inverse(const mat& a) {
  if (a.rows() != a.cols()) throw dimension_error("brute_force_inverse: matrix must be square");
  const Eigen::Index n = a.rows();
  mat aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n).setIdentity();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(aug(r, col)) > std::abs(aug(pivot, col))) pivot = r;
    if (aug(pivot, col) == 0.0) throw error("brute_force_inverse: singular matrix");
    aug.row(col).swap(aug.row(pivot));
    aug.row(col) /= aug(col, col);
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != col) aug.row(r) -= aug(r, col) * aug.row(col);
  }
  return aug.rightCols(n);
}

vector_field test_hamiltonian_field(group_kind group, int particle, int component, real w) {
  const int n = group == group_kind::so3 ? 3 : 6;
  return [=](const vec& x) {
    vec out = vec::Zero(x.size());
    const Eigen::Index off = static_cast<Eigen::Index>(particle) * n;
    const vec3 pi = x.segment<3>(off);
    if (group == group_kind::so3) {
      out.segment<3>(off) = w * pi.cross(vec3::Unit(component));
      return out;
    }
    const vec3 p = x.segment<3>(off + 3);
    if (component < 3) {
      out.segment<3>(off) = w * pi.cross(vec3::Unit(component));
      out.segment<3>(off + 3) = w * p.cross(vec3::Unit(component));
    } else {
      out.segment<3>(off) = w * p.cross(vec3::Unit(component - 3));
    }
    return out;
  };
}

}  // namespace colp::oracles
