#pragma once

#include "colp/control.hpp"
#include "colp/lie.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace colp {

struct integrator_config {
  real dt_output = 0.1;
  int substeps = 100;
  real fp_tol = 1e-14;
  int max_iters = 200;

  void validate() const;
};

/// Fixed-point iteration of the implicit midpoint rule did not converge.
class convergence_error : public error {
public:
  convergence_error(const std::string& what, real residual) : error(what), residual_(residual) {}
  real residual() const { return residual_; }

private:
  real residual_;
};

/// States sampled every dt, starting at t = 0.
struct trajectory {
  group_spec group;
  int num_particles = 0;
  real dt = 0.0;
  std::vector<vec> states;
  std::string description;

  std::size_t size() const { return states.size(); }
  phase_state state(std::size_t i) const { return {group, num_particles, states[i]}; }
};

/// One implicit midpoint step mu+ = mu + h F((mu + mu+)/2). A negative h runs backwards.
vec midpoint_substep(const control_model& model, const vec& mu, real h, const integrator_config& config = {});
phase_state midpoint_substep(const control_model& model, const phase_state& state, real h,
                             const integrator_config& config = {});

/// Advances by one output interval using `config.substeps` midpoint substeps.
vec advance(const control_model& model, const vec& mu, const integrator_config& config);

trajectory integrate(const control_model& model, const phase_state& initial, const integrator_config& config,
                     int num_points);

/// Energy and Casimir series along a trajectory with deviations from t = 0.
struct diagnostics_report {
  std::vector<real> energy;
  /// per output point, particle-major Casimir values
  std::vector<std::vector<real>> casimirs;
  real max_energy_deviation = 0.0;
  real max_relative_energy_deviation = 0.0;
  /// per Casimir slot (particle-major)
  std::vector<real> max_casimir_deviation;
  std::vector<real> max_relative_casimir_deviation;

  real worst_relative_casimir_deviation() const;
};

diagnostics_report diagnostics(const control_model& model, const trajectory& traj);

}  // namespace colp
