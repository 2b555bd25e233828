#include "colp/control.hpp"

#include <Eigen/Geometry>

#include <Eigen/Cholesky>

#include <cmath>
#include <vector>

namespace colp {

std::string_view to_string(topology_kind kind) {
  switch (kind) {
    case topology_kind::dictatorship: return "dictatorship";
    case topology_kind::democracy: return "democracy";
    case topology_kind::custom: return "custom";
  }
  return "unknown";
}

topology_kind parse_topology(std::string_view name) {
  if (name == "dictatorship") return topology_kind::dictatorship;
  if (name == "democracy") return topology_kind::democracy;
  if (name == "custom") return topology_kind::custom;
  throw error("unknown topology '" + std::string(name) + "' (expected dictatorship or democracy)");
}

namespace {

mat adjacency_of(const topology& topo, int n) {
  switch (topo.kind) {
    case topology_kind::dictatorship: {
      mat a = mat::Zero(n, n);
      for (int j = 1; j < n; ++j) a(0, j) = a(j, 0) = 1.0;
      return a;
    }
    case topology_kind::democracy: {
      mat a = mat::Ones(n, n);
      a.diagonal().setZero();
      return a;
    }
    case topology_kind::custom: break;
  }
  const mat& a = topo.adjacency;
  if (a.rows() != n || a.cols() != n) throw dimension_error("custom adjacency must be N x N");
  for (int i = 0; i < n; ++i) {
    if (a(i, i) != 0.0) throw error("custom adjacency must have a zero diagonal");
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != 0.0 && a(i, j) != 1.0) throw error("custom adjacency entries must be 0 or 1");
      if (a(i, j) != a(j, i)) throw error("custom adjacency must be symmetric");
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<int> stack{0};
  seen[0] = true;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u = 0; u < n; ++u)
      if (a(v, u) != 0.0 && !seen[static_cast<std::size_t>(u)]) {
        seen[static_cast<std::size_t>(u)] = true;
        ++reached;
        stack.push_back(u);
      }
  }
  if (reached != n) throw error("custom interaction graph is disconnected");
  return a;
}

}  // namespace

mat laplacian(const topology& topo, int num_particles) {
  if (num_particles < 1) throw dimension_error("laplacian: need at least one particle");
  const mat a = adjacency_of(topo, num_particles);
  mat b = -a;
  b.diagonal() = a.rowwise().sum();
  return b;
}

mat psi_closed_form(const topology& topo, int num_particles, real chi) {
  if (num_particles < 1) throw dimension_error("psi_closed_form: need at least one particle");
  if (chi < 0.0) throw error("psi_closed_form: chi must be non-negative");
  const int n = num_particles;
  const real big = 1.0 + 2.0 * n * chi;
  mat psi(n, n);
  switch (topo.kind) {
    case topology_kind::democracy:
      psi.setConstant(2.0 * chi / big);
      psi.diagonal().setConstant((1.0 + 2.0 * chi) / big);
      return psi;
    case topology_kind::dictatorship: {
      const real small = 1.0 + 2.0 * chi;
      psi.setConstant(4.0 * chi * chi / (big * small));
      psi.diagonal().setConstant((big + 4.0 * chi * chi) / (big * small));
      psi.row(0).setConstant(2.0 * chi / big);
      psi.col(0).setConstant(2.0 * chi / big);
      psi(0, 0) = small / big;
      return psi;
    }
    case topology_kind::custom: break;
  }
  throw error("psi_closed_form: no closed form for custom topologies, use psi_solve");
}

mat psi_solve(const topology& topo, int num_particles, real chi) {
  if (chi < 0.0) throw error("psi_solve: chi must be non-negative");
  const mat b = laplacian(topo, num_particles);
  const mat system = mat::Identity(num_particles, num_particles) + 2.0 * chi * b;
  Eigen::LLT<mat> llt(system);
  if (llt.info() != Eigen::Success) throw error("psi_solve: (I + 2 chi B) is not positive definite");
  mat psi = llt.solve(mat::Identity(num_particles, num_particles));
  if (!psi.allFinite()) throw error("psi_solve: singular system");
  return psi;
}

control_model::control_model(group_spec group, topology topo, int num_particles, real chi,
                             std::optional<int> drift_override)
    : group_(group), topo_(std::move(topo)), num_particles_(num_particles), chi_(chi),
      drift_(drift_override.value_or(group.drift)) {
  if (num_particles < 1) throw dimension_error("control_model: need at least one particle");
  if (chi < 0.0) throw error("control_model: chi must be non-negative");
  if (drift_ < group_.controls || drift_ >= group_.dim)
    throw error("control_model: drift index must lie outside the controlled components");
  psi_ = topo_.kind == topology_kind::custom ? psi_solve(topo_, num_particles, chi)
                                             : psi_closed_form(topo_, num_particles, chi);
}

void control_model::check(const phase_state& state) const {
  if (state.group.kind != group_.kind)
    throw dimension_error("control_model: state group does not match model group");
  if (state.num_particles != num_particles_ || state.size() != state_size())
    throw dimension_error("control_model: state particle count does not match model");
}

real control_model::hamiltonian(const phase_state& state) const {
  check(state);
  return hamiltonian(state.mu);
}

vec control_model::grad_hamiltonian(const phase_state& state) const {
  check(state);
  vec g;
  grad_hamiltonian(state.mu, g);
  return g;
}

vec control_model::vector_field(const phase_state& state) const {
  check(state);
  vec f;
  vector_field(state.mu, f);
  return f;
}

real control_model::hamiltonian(const vec& mu) const {
  const int n = group_.dim;
  const int m = group_.controls;
  real drift = 0.0;
  for (int k = 0; k < num_particles_; ++k) drift += mu(k * n + drift_);
  real quad = 0.0;
  for (int k = 0; k < num_particles_; ++k)
    for (int l = 0; l < num_particles_; ++l) {
      real dot = 0.0;
      for (int i = 0; i < m; ++i) dot += mu(k * n + i) * mu(l * n + i);
      quad += psi_(k, l) * dot;
    }
  return drift + 0.5 * quad;
}

void control_model::grad_hamiltonian(const vec& mu, vec& grad) const {
  const int n = group_.dim;
  const int m = group_.controls;
  grad.setZero(mu.size());
  for (int k = 0; k < num_particles_; ++k) {
    for (int i = 0; i < m; ++i) {
      real s = 0.0;
      for (int l = 0; l < num_particles_; ++l) s += psi_(k, l) * mu(l * n + i);
      grad(k * n + i) = s;
    }
    grad(k * n + drift_) = 1.0;
  }
}

void control_model::vector_field(const vec& mu, vec& out) const {
  static const real r = 1.0 / std::sqrt(2.0);
  vec g;
  grad_hamiltonian(mu, g);
  out.resize(mu.size());
  const int n = group_.dim;
  for (int k = 0; k < num_particles_; ++k) {
    const Eigen::Index off = static_cast<Eigen::Index>(k) * n;
    if (group_.kind == group_kind::so3) {
      const vec3 m3 = mu.segment<3>(off);
      out.segment<3>(off) = r * m3.cross(g.segment<3>(off));
    } else {
      const vec3 pi = mu.segment<3>(off);
      const vec3 p = mu.segment<3>(off + 3);
      const vec3 g_pi = g.segment<3>(off);
      const vec3 g_p = g.segment<3>(off + 3);
      out.segment<3>(off) = r * (pi.cross(g_pi) + p.cross(g_p));
      out.segment<3>(off + 3) = r * p.cross(g_pi);
    }
  }
}

real control_model::energy_scale(const vec& mu) const {
  const int n = group_.dim;
  real drift = 0.0;
  for (int k = 0; k < num_particles_; ++k) drift += std::abs(mu(k * n + drift_));
  const real h = hamiltonian(mu);
  real linear = 0.0;
  for (int k = 0; k < num_particles_; ++k) linear += mu(k * n + drift_);
  // Psi is positive definite, so the quadratic part is already non-negative.
  return drift + (h - linear);
}

control_model single_particle_so3() { return {group_spec::so3(), topology::democracy(), 1, 0.0}; }

control_model single_particle_se3_mu6_drift() {
  return {group_spec::se3(), topology::democracy(), 1, 0.0, 5};
}

}  // namespace colp
