#include "colp/lie.hpp"

#include <algorithm>
#include <cmath>

namespace colp {

std::string_view to_string(group_kind kind) { return kind == group_kind::so3 ? "so3" : "se3"; }

group_kind parse_group(std::string_view name) {
  if (name == "so3" || name == "SO3") return group_kind::so3;
  if (name == "se3" || name == "SE3") return group_kind::se3;
  throw error("unknown group '" + std::string(name) + "' (expected so3 or se3)");
}

phase_state::phase_state(group_spec g, int n, vec values) : group(g), num_particles(n), mu(std::move(values)) {
  if (n < 1) throw dimension_error("phase_state: need at least one particle");
  if (mu.size() != static_cast<Eigen::Index>(g.dim) * n)
    throw dimension_error("phase_state: expected " + std::to_string(g.dim * n) + " components, got " +
                          std::to_string(mu.size()));
  if (!mu.allFinite()) throw error("phase_state: non-finite component");
}

namespace {

struct entry {
  int s, i, j;  // 1-based, as tabulated for se(3)
  int sign;
};

}  // namespace

structure_constants make_structure_constants(const group_spec& group) {
  const real r = 1.0 / std::sqrt(2.0);
  structure_constants gamma(group.dim);
  if (group.kind == group_kind::so3) {
    // Γ^k_{ij} = ε_{ijk} / sqrt(2)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const int eps = (i - j) * (j - k) * (k - i) / 2;
          gamma(k, i, j) = eps * r;
        }
    return gamma;
  }
  static constexpr std::array<entry, 18> se3_table{{
      {5, 6, 1, +1}, {5, 1, 6, -1}, {4, 6, 2, -1}, {4, 2, 6, +1}, {5, 4, 3, -1}, {5, 3, 4, +1},
      {6, 4, 2, +1}, {6, 2, 4, -1}, {4, 5, 3, +1}, {4, 3, 5, -1}, {6, 5, 1, -1}, {6, 1, 5, +1},
      {2, 3, 1, +1}, {2, 1, 3, -1}, {1, 3, 2, -1}, {1, 2, 3, +1}, {3, 1, 2, +1}, {3, 2, 1, -1},
  }};
  for (const auto& e : se3_table) gamma(e.s - 1, e.i - 1, e.j - 1) = e.sign * r;
  return gamma;
}

real antisymmetry_residual(const structure_constants& gamma) {
  const int n = gamma.dim();
  real worst = 0.0;
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(gamma(s, i, j) + gamma(s, j, i)));
  return worst;
}

real jacobi_residual(const structure_constants& gamma) {
  const int n = gamma.dim();
  real worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int r = 0; r < n; ++r) {
          real sum = 0.0;
          for (int s = 0; s < n; ++s)
            sum += gamma(s, i, j) * gamma(r, s, k) + gamma(s, j, k) * gamma(r, s, i) + gamma(s, k, i) * gamma(r, s, j);
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

mat poisson_tensor(const phase_state& state) {
  const int n = state.group.dim;
  const Eigen::Index d = state.size();
  mat lambda = mat::Zero(d, d);
  const real r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < state.num_particles; ++k)
    lambda.block(static_cast<Eigen::Index>(k) * n, static_cast<Eigen::Index>(k) * n, n, n) =
        r * hat_block(state.group, state.particle(k));
  return lambda;
}

mat poisson_tensor_from_structure(const phase_state& state, const structure_constants& gamma) {
  const int n = state.group.dim;
  if (gamma.dim() != n) throw dimension_error("poisson_tensor_from_structure: algebra dimension mismatch");
  const Eigen::Index d = state.size();
  mat lambda = mat::Zero(d, d);
  for (int k = 0; k < state.num_particles; ++k) {
    const auto mu_k = state.particle(k);
    const Eigen::Index off = static_cast<Eigen::Index>(k) * n;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        real v = 0.0;
        for (int s = 0; s < n; ++s) v -= mu_k(s) * gamma(s, a, b);
        lambda(off + a, off + b) = v;
      }
  }
  return lambda;
}

casimir_report casimirs(const phase_state& state) {
  casimir_report report;
  report.group = state.group;
  report.num_particles = state.num_particles;
  const int per = state.group.casimirs_per_particle();
  report.values.reserve(static_cast<std::size_t>(per * state.num_particles));
  report.scales.reserve(report.values.capacity());
  for (int k = 0; k < state.num_particles; ++k) {
    const auto mu_k = state.particle(k);
    if (state.group.kind == group_kind::so3) {
      const real c = mu_k.squaredNorm();
      report.values.push_back(c);
      report.scales.push_back(c);
    } else {
      const auto pi = mu_k.head<3>();
      const auto p = mu_k.tail<3>();
      const real c1 = p.squaredNorm();
      report.values.push_back(c1);
      report.scales.push_back(c1);
      report.values.push_back(pi.dot(p));
      report.scales.push_back(pi.norm() * p.norm());
    }
  }
  return report;
}

vec casimir_gradient(const phase_state& state, int particle, int which) {
  vec grad = vec::Zero(state.size());
  const int n = state.group.dim;
  const Eigen::Index off = static_cast<Eigen::Index>(particle) * n;
  const auto mu_k = state.particle(particle);
  if (state.group.kind == group_kind::so3) {
    grad.segment(off, 3) = 2.0 * mu_k;
  } else if (which == 0) {
    grad.segment(off + 3, 3) = 2.0 * mu_k.tail<3>();
  } else {
    grad.segment(off, 3) = mu_k.tail<3>();
    grad.segment(off + 3, 3) = mu_k.head<3>();
  }
  return grad;
}

}  // namespace colp
