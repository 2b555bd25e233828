#pragma once

#include "colp/control.hpp"
#include "colp/dataset.hpp"
#include "colp/integrator.hpp"
#include "colp/poisson_maps.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace colp {

/// Shallow scalar network w = v . tanh(M x + b) + c.
struct param_net {
  mat hidden;          // W x d
  vec hidden_bias;     // W
  vec output_weights;  // W
  real output_bias = 0.0;

  static param_net zeros(Eigen::Index input_dim, Eigen::Index width);

  Eigen::Index input_dim() const { return hidden.cols(); }
  Eigen::Index width() const { return hidden.rows(); }
  Eigen::Index parameter_count() const { return input_dim() * width() + 2 * width() + 1; }

  /// Flattened as hidden (row-major), hidden_bias, output_weights, output_bias.
  vec parameters() const;
  void set_parameters(const Eigen::Ref<const vec>& p);
};

real net_forward(const param_net& net, const Eigen::Ref<const vec>& mu0);

/// dw/dtheta in the flattened parameter order.
vec net_parameter_gradient(const param_net& net, const Eigen::Ref<const vec>& mu0);

/// Provenance carried in the model file.
struct model_info {
  std::string topology = "unknown";
  real chi = 0.0;
  std::uint64_t init_seed = 0;
  std::uint64_t data_seed = 0;
  int epochs_trained = 0;
  real learning_rate = 0.0;
  real final_loss = 0.0;
};

class colpnet {
public:
  colpnet(group_spec group, int num_particles, map_schedule schedule, Eigen::Index width);

  /// Hidden and output weights i.i.d. normal with std `init_scale`, biases zero.
  static colpnet random(group_spec group, int num_particles, map_schedule schedule, Eigen::Index width,
                        real init_scale, std::uint64_t seed);

  /// Glorot-uniform weights, limit sqrt(6 / (fan_in + fan_out)), biases zero.
  static colpnet glorot(group_spec group, int num_particles, map_schedule schedule, Eigen::Index width,
                        std::uint64_t seed);

  const group_spec& group() const { return group_; }
  int num_particles() const { return num_particles_; }
  Eigen::Index state_size() const { return static_cast<Eigen::Index>(group_.dim) * num_particles_; }
  const map_schedule& schedule() const { return schedule_; }
  real delta_t() const { return schedule_.delta_t; }
  Eigen::Index width() const { return width_; }
  std::size_t num_maps() const { return nets_.size(); }

  const std::vector<param_net>& nets() const { return nets_; }
  std::vector<param_net>& nets() { return nets_; }

  Eigen::Index parameters_per_net() const;
  Eigen::Index parameter_count() const;
  vec parameters() const;
  void set_parameters(const Eigen::Ref<const vec>& p);

  model_info info;

private:
  group_spec group_;
  int num_particles_;
  map_schedule schedule_;
  Eigen::Index width_;
  std::vector<param_net> nets_;
};

/// Output of one learned step with everything needed for backpropagation.
struct step_cache {
  vec output;
  std::vector<real> w;
  /// states before each map and after the last (K + 1 entries)
  std::vector<vec> states;
};

step_cache step_forward(const colpnet& model, const Eigen::Ref<const vec>& mu0);
vec step(const colpnet& model, const Eigen::Ref<const vec>& mu0);

/// Sum over rows of |end - step(begin)|^2.
real loss(const colpnet& model, const sample_matrix& begin, const sample_matrix& end);
real loss(const colpnet& model, const pair_set& pairs);

struct loss_and_gradient {
  real loss = 0.0;
  vec gradient;
};

/// Analytic gradient in the flattened parameter order; reduction order is
/// fixed so results do not depend on the worker count.
loss_and_gradient grad_loss(const colpnet& model, const sample_matrix& begin, const sample_matrix& end);
loss_and_gradient grad_loss(const colpnet& model, const pair_set& pairs);

struct adam_config {
  real learning_rate = 0.005;
  real beta1 = 0.9;
  real beta2 = 0.999;
  real epsilon = 1e-8;
};

struct adam_state {
  vec m;
  vec v;
  long step = 0;

  explicit adam_state(Eigen::Index size = 0) : m(vec::Zero(size)), v(vec::Zero(size)) {}
};

/// Bias-corrected Adam update.
void adam_step(vec& params, const vec& grads, adam_state& state, const adam_config& config);

struct train_config {
  adam_config adam;
  int epochs = 10000;
  real init_scale = 0.1;
  std::uint64_t seed = 0;
};

struct train_result {
  colpnet model;
  /// mean-per-sample loss before each update, plus the final loss (epochs + 1 entries)
  std::vector<real> history;
};

using epoch_callback = std::function<void(int epoch, real mean_loss)>;

train_result train(colpnet model, const sample_matrix& begin, const sample_matrix& end, const train_config& config,
                   const epoch_callback& on_epoch = {});
train_result train(colpnet model, const pair_set& pairs, const train_config& config,
                   const epoch_callback& on_epoch = {});

/// Iterates the learned step; returns num_steps + 1 states.
trajectory reconstruct(const colpnet& model, const phase_state& initial, int num_steps);

struct evaluation_run {
  trajectory ground_truth;
  trajectory learned;
  diagnostics_report ground_diagnostics;
  diagnostics_report learned_diagnostics;
};

struct evaluation_report {
  std::vector<evaluation_run> runs;
  /// mean absolute error per step, averaged over runs and components
  std::vector<real> mae;

  real mean_mae() const;
  real worst_learned_casimir_drift() const;
  real worst_ground_casimir_drift() const;
  real worst_ground_energy_drift() const;
};

evaluation_report evaluate(const colpnet& model, const control_model& ground_model,
                           const std::vector<phase_state>& initials, int num_steps,
                           const integrator_config& integrator);

/// Max |h(t) - h(0)| over the first and second halves of an energy series.
struct energy_halves {
  real first = 0.0;
  real second = 0.0;
};
energy_halves energy_deviation_halves(const std::vector<real>& energy);

inline constexpr int model_schema_version = 1;

void save_model(const colpnet& model, const std::filesystem::path& path);
colpnet load_model(const std::filesystem::path& path);

}  // namespace colp
