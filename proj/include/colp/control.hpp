#pragma once

#include "colp/types.hpp"

#include <optional>

namespace colp {

enum class topology_kind { dictatorship, democracy, custom };

std::string_view to_string(topology_kind kind);
topology_kind parse_topology(std::string_view name);

/// Interaction graph. Particle 0 is the hub for dictatorship.
struct topology {
  topology_kind kind = topology_kind::democracy;
  /// Only used for custom graphs: symmetric 0/1, zero diagonal.
  mat adjacency;

  static topology dictatorship() { return {topology_kind::dictatorship, {}}; }
  static topology democracy() { return {topology_kind::democracy, {}}; }
  static topology custom(mat adjacency) { return {topology_kind::custom, std::move(adjacency)}; }
};

/// B = D - A. Throws for malformed or disconnected custom graphs.
mat laplacian(const topology& topo, int num_particles);

/// Printed closed-form (I + 2 chi B)^{-1} for dictatorship and democracy.
mat psi_closed_form(const topology& topo, int num_particles, real chi);

/// (I + 2 chi B)^{-1} by Cholesky solve; valid for every topology.
mat psi_solve(const topology& topo, int num_particles, real chi);

/// Reduced control Hamiltonian h = sum_k mu_{k,drift} + 1/2 mu~^T (Psi (x) I_m) mu~
/// with its gradient and Lie-Poisson vector field.
class control_model {
public:
  /// `drift_override` replaces the group's default drift index (0-based).
  control_model(group_spec group, topology topo, int num_particles, real chi,
                std::optional<int> drift_override = std::nullopt);

  const group_spec& group() const { return group_; }
  const topology& topo() const { return topo_; }
  int num_particles() const { return num_particles_; }
  real chi() const { return chi_; }
  int drift() const { return drift_; }
  int controls() const { return group_.controls; }
  const mat& psi() const { return psi_; }
  Eigen::Index state_size() const { return static_cast<Eigen::Index>(group_.dim) * num_particles_; }

  real hamiltonian(const phase_state& state) const;
  vec grad_hamiltonian(const phase_state& state) const;
  vec vector_field(const phase_state& state) const;

  // Unchecked raw-vector forms used by the integrator.
  real hamiltonian(const vec& mu) const;
  void grad_hamiltonian(const vec& mu, vec& grad) const;
  void vector_field(const vec& mu, vec& out) const;

  /// Sum of absolute term magnitudes of h, used to form relative energy drift.
  real energy_scale(const vec& mu) const;

private:
  void check(const phase_state& state) const;

  group_spec group_;
  topology topo_;
  int num_particles_;
  real chi_;
  int drift_;
  mat psi_;
};

/// Single-particle model h = mu_2 + mu_1^2 / 2 on SO(3).
control_model single_particle_so3();
/// Single-particle SE(3) model with drift along the third linear momentum:
/// h = mu_6 + (mu_1^2 + mu_2^2) / 2.
control_model single_particle_se3_mu6_drift();

}  // namespace colp
