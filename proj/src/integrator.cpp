#include "colp/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace colp {

void integrator_config::validate() const {
  if (!(dt_output > 0.0)) throw error("integrator: dt_output must be positive");
  if (substeps < 1) throw error("integrator: substeps must be at least 1");
  if (!(fp_tol > 0.0)) throw error("integrator: fp_tol must be positive");
  if (max_iters < 1) throw error("integrator: max_iters must be at least 1");
}

vec midpoint_substep(const control_model& model, const vec& mu, real h, const integrator_config& config) {
  if (h == 0.0 || !std::isfinite(h)) throw error("midpoint_substep: step must be finite and nonzero");
  vec field;
  model.vector_field(mu, field);
  vec next = mu + h * field;
  vec mid(mu.size());
  real update = 0.0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    mid = 0.5 * (mu + next);
    model.vector_field(mid, field);
    vec candidate = mu + h * field;
    update = (candidate - next).lpNorm<Eigen::Infinity>();
    next = std::move(candidate);
    if (update <= config.fp_tol) return next;
    if (!std::isfinite(update)) break;
  }
  std::ostringstream msg;
  msg << "midpoint_substep: fixed point did not converge in " << config.max_iters << " iterations (last update "
      << update << ", step " << h << ")";
  throw convergence_error(msg.str(), update);
}

phase_state midpoint_substep(const control_model& model, const phase_state& state, real h,
                             const integrator_config& config) {
  if (state.group.kind != model.group().kind || state.size() != model.state_size())
    throw dimension_error("midpoint_substep: state does not match model");
  return {state.group, state.num_particles, midpoint_substep(model, state.mu, h, config)};
}

vec advance(const control_model& model, const vec& mu, const integrator_config& config) {
  const real h = config.dt_output / config.substeps;
  vec x = mu;
  for (int s = 0; s < config.substeps; ++s) x = midpoint_substep(model, x, h, config);
  return x;
}

trajectory integrate(const control_model& model, const phase_state& initial, const integrator_config& config,
                     int num_points) {
  config.validate();
  if (num_points < 2) throw error("integrate: need at least two output points");
  if (initial.group.kind != model.group().kind || initial.size() != model.state_size())
    throw dimension_error("integrate: initial state does not match model");
  trajectory traj;
  traj.group = initial.group;
  traj.num_particles = initial.num_particles;
  traj.dt = config.dt_output;
  traj.states.reserve(static_cast<std::size_t>(num_points));
  traj.states.push_back(initial.mu);
  for (int i = 1; i < num_points; ++i) traj.states.push_back(advance(model, traj.states.back(), config));
  std::ostringstream desc;
  desc << to_string(model.group().kind) << " " << to_string(model.topo().kind) << " N=" << model.num_particles()
       << " chi=" << model.chi() << " dt=" << config.dt_output << " substeps=" << config.substeps;
  traj.description = desc.str();
  return traj;
}

real diagnostics_report::worst_relative_casimir_deviation() const {
  real worst = 0.0;
  for (real v : max_relative_casimir_deviation) worst = std::max(worst, v);
  return worst;
}

diagnostics_report diagnostics(const control_model& model, const trajectory& traj) {
  if (traj.states.empty()) throw error("diagnostics: empty trajectory");
  diagnostics_report report;
  const phase_state first = traj.state(0);
  const casimir_report c0 = casimirs(first);
  const real h0 = model.hamiltonian(first);
  const real h_scale = model.energy_scale(first.mu);
  const std::size_t slots = c0.values.size();
  report.max_casimir_deviation.assign(slots, 0.0);
  report.max_relative_casimir_deviation.assign(slots, 0.0);
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const phase_state s = traj.state(t);
    const real h = model.hamiltonian(s);
    report.energy.push_back(h);
    const real dh = std::abs(h - h0);
    report.max_energy_deviation = std::max(report.max_energy_deviation, dh);
    if (h_scale > 0.0) report.max_relative_energy_deviation = std::max(report.max_relative_energy_deviation, dh / h_scale);
    casimir_report c = casimirs(s);
    for (std::size_t j = 0; j < slots; ++j) {
      const real dc = std::abs(c.values[j] - c0.values[j]);
      report.max_casimir_deviation[j] = std::max(report.max_casimir_deviation[j], dc);
      if (c0.scales[j] > 0.0)
        report.max_relative_casimir_deviation[j] = std::max(report.max_relative_casimir_deviation[j], dc / c0.scales[j]);
    }
    report.casimirs.push_back(std::move(c.values));
  }
  return report;
}

}  // namespace colp
