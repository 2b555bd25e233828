#include "colp/colpnet.hpp"

#include "colp/parallel.hpp"
#include "colp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace colp {

// ---- param_net ----

param_net param_net::zeros(Eigen::Index input_dim, Eigen::Index width) {
  if (input_dim < 1 || width < 1) throw error("param_net: input_dim and width must be positive");
  return {mat::Zero(width, input_dim), vec::Zero(width), vec::Zero(width), 0.0};
}

vec param_net::parameters() const {
  vec p(parameter_count());
  Eigen::Index o = 0;
  for (Eigen::Index r = 0; r < width(); ++r)
    for (Eigen::Index c = 0; c < input_dim(); ++c) p(o++) = hidden(r, c);
  p.segment(o, width()) = hidden_bias;
  o += width();
  p.segment(o, width()) = output_weights;
  o += width();
  p(o) = output_bias;
  return p;
}

void param_net::set_parameters(const Eigen::Ref<const vec>& p) {
  if (p.size() != parameter_count()) throw dimension_error("param_net: parameter vector has the wrong length");
  Eigen::Index o = 0;
  for (Eigen::Index r = 0; r < width(); ++r)
    for (Eigen::Index c = 0; c < input_dim(); ++c) hidden(r, c) = p(o++);
  hidden_bias = p.segment(o, width());
  o += width();
  output_weights = p.segment(o, width());
  o += width();
  output_bias = p(o);
}

real net_forward(const param_net& net, const Eigen::Ref<const vec>& mu0) {
  if (mu0.size() != net.input_dim()) throw dimension_error("net_forward: input has the wrong length");
  const vec a = (net.hidden * mu0 + net.hidden_bias).array().tanh().matrix();
  return net.output_weights.dot(a) + net.output_bias;
}

vec net_parameter_gradient(const param_net& net, const Eigen::Ref<const vec>& mu0) {
  if (mu0.size() != net.input_dim()) throw dimension_error("net_parameter_gradient: input has the wrong length");
  const vec a = (net.hidden * mu0 + net.hidden_bias).array().tanh().matrix();
  const vec dz = net.output_weights.array() * (1.0 - a.array().square());
  vec g(net.parameter_count());
  Eigen::Index o = 0;
  for (Eigen::Index r = 0; r < net.width(); ++r)
    for (Eigen::Index c = 0; c < net.input_dim(); ++c) g(o++) = dz(r) * mu0(c);
  g.segment(o, net.width()) = dz;
  o += net.width();
  g.segment(o, net.width()) = a;
  o += net.width();
  g(o) = 1.0;
  return g;
}

// ---- colpnet ----

colpnet::colpnet(group_spec group, int num_particles, map_schedule schedule, Eigen::Index width)
    : group_(group), num_particles_(num_particles), schedule_(std::move(schedule)), width_(width) {
  if (num_particles < 1) throw error("colpnet: need at least one particle");
  if (width < 1) throw error("colpnet: width must be positive");
  if (schedule_.maps.empty()) throw error("colpnet: empty map schedule");
  for (const auto& m : schedule_.maps) validate(m, group_, num_particles_);
  nets_.assign(schedule_.size(), param_net::zeros(state_size(), width_));
}

colpnet colpnet::random(group_spec group, int num_particles, map_schedule schedule, Eigen::Index width,
                        real init_scale, std::uint64_t seed) {
  if (!(init_scale >= 0.0)) throw error("colpnet: init_scale must be non-negative");
  colpnet model(group, num_particles, std::move(schedule), width);
  rng gen(seed);
  for (auto& net : model.nets_) {
    for (Eigen::Index r = 0; r < net.width(); ++r)
      for (Eigen::Index c = 0; c < net.input_dim(); ++c) net.hidden(r, c) = init_scale * gen.normal();
    for (Eigen::Index r = 0; r < net.width(); ++r) net.output_weights(r) = init_scale * gen.normal();
  }
  model.info.init_seed = seed;
  return model;
}

colpnet colpnet::glorot(group_spec group, int num_particles, map_schedule schedule, Eigen::Index width,
                        std::uint64_t seed) {
  colpnet model(group, num_particles, std::move(schedule), width);
  rng gen(seed);
  const real d = static_cast<real>(model.state_size());
  const real w = static_cast<real>(width);
  const real hidden_limit = std::sqrt(6.0 / (d + w));
  const real output_limit = std::sqrt(6.0 / (w + 1.0));
  for (auto& net : model.nets_) {
    for (Eigen::Index r = 0; r < net.width(); ++r)
      for (Eigen::Index c = 0; c < net.input_dim(); ++c) net.hidden(r, c) = gen.uniform(-hidden_limit, hidden_limit);
    for (Eigen::Index r = 0; r < net.width(); ++r) net.output_weights(r) = gen.uniform(-output_limit, output_limit);
  }
  model.info.init_seed = seed;
  return model;
}

Eigen::Index colpnet::parameters_per_net() const { return state_size() * width_ + 2 * width_ + 1; }

Eigen::Index colpnet::parameter_count() const {
  return parameters_per_net() * static_cast<Eigen::Index>(nets_.size());
}

vec colpnet::parameters() const {
  vec p(parameter_count());
  const Eigen::Index per = parameters_per_net();
  for (std::size_t k = 0; k < nets_.size(); ++k) p.segment(static_cast<Eigen::Index>(k) * per, per) = nets_[k].parameters();
  return p;
}

void colpnet::set_parameters(const Eigen::Ref<const vec>& p) {
  if (p.size() != parameter_count()) throw dimension_error("colpnet: parameter vector has the wrong length");
  const Eigen::Index per = parameters_per_net();
  for (std::size_t k = 0; k < nets_.size(); ++k) nets_[k].set_parameters(p.segment(static_cast<Eigen::Index>(k) * per, per));
}

// ---- single step ----

step_cache step_forward(const colpnet& model, const Eigen::Ref<const vec>& mu0) {
  if (mu0.size() != model.state_size()) throw dimension_error("step: state has the wrong length");
  step_cache c;
  const std::size_t k_count = model.num_maps();
  c.w.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) c.w[k] = net_forward(model.nets()[k], mu0);
  c.states.reserve(k_count + 1);
  vec x = mu0;
  const int n = model.group().dim;
  for (std::size_t k = 0; k < k_count; ++k) {
    c.states.push_back(x);
    const auto& desc = model.schedule().maps[k];
    detail::apply_block(model.group(), desc, c.w[k] * model.delta_t(), x.data() + static_cast<Eigen::Index>(desc.particle) * n);
  }
  c.states.push_back(x);
  c.output = std::move(x);
  return c;
}

vec step(const colpnet& model, const Eigen::Ref<const vec>& mu0) { return step_forward(model, mu0).output; }

// ---- batched loss and gradient ----

namespace {

constexpr Eigen::Index chunk_rows = 256;

/// All K nets stacked so the hidden layer of a batch is one matrix product.
struct packed_nets {
  mat hidden;       // KW x d
  vec hidden_bias;  // KW
  mat output;       // K x W
  vec output_bias;  // K

  explicit packed_nets(const colpnet& model) {
    const Eigen::Index k_count = static_cast<Eigen::Index>(model.num_maps());
    const Eigen::Index w = model.width();
    const Eigen::Index d = model.state_size();
    hidden.resize(k_count * w, d);
    hidden_bias.resize(k_count * w);
    output.resize(k_count, w);
    output_bias.resize(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const auto& net = model.nets()[static_cast<std::size_t>(k)];
      hidden.middleRows(k * w, w) = net.hidden;
      hidden_bias.segment(k * w, w) = net.hidden_bias;
      output.row(k) = net.output_weights.transpose();
      output_bias(k) = net.output_bias;
    }
  }
};

struct chunk_result {
  real loss = 0.0;
  mat d_hidden;
  vec d_hidden_bias;
  mat d_output;
  vec d_output_bias;
};

/// gradient of g^T A(theta) x with respect to theta for one map block
real block_derivative_form(const group_spec& group, const map_descriptor& desc, real co, real si, const real* g,
                           const real* x) {
  if (group.kind == group_kind::so3) return detail::rotation_derivative_form(g, x, desc.component, co, si);
  if (desc.kind == map_kind::rotation)
    return detail::rotation_derivative_form(g, x, desc.component, co, si) +
           detail::rotation_derivative_form(g + 3, x + 3, desc.component, co, si);
  const int a = desc.component - 3;
  const int b = (a + 1) % 3;
  const int c = (a + 2) % 3;
  return g[b] * x[3 + c] - g[c] * x[3 + b];
}

/// g <- A^T g on one block
void block_transpose(const group_spec& group, const map_descriptor& desc, real theta, real co, real si, real* g) {
  if (group.kind == group_kind::so3) {
    detail::rotate_transpose(g, desc.component, co, si);
  } else if (desc.kind == map_kind::rotation) {
    detail::rotate_transpose(g, desc.component, co, si);
    detail::rotate_transpose(g + 3, desc.component, co, si);
  } else {
    const int a = desc.component - 3;
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    g[3 + c] += theta * g[b];
    g[3 + b] -= theta * g[c];
  }
}

chunk_result run_chunk(const colpnet& model, const packed_nets& packed, const sample_matrix& begin,
                       const sample_matrix& end, Eigen::Index r0, Eigen::Index rows, bool want_gradient) {
  const group_spec& group = model.group();
  const int n = group.dim;
  const Eigen::Index d = model.state_size();
  const Eigen::Index w = model.width();
  const Eigen::Index k_count = static_cast<Eigen::Index>(model.num_maps());
  const real t_star = model.delta_t();
  const auto& maps = model.schedule().maps;

  const auto x0 = begin.middleRows(r0, rows);
  mat act = (x0 * packed.hidden.transpose()).rowwise() + packed.hidden_bias.transpose();
  act = act.array().tanh().matrix();

  chunk_result out;
  mat d_act;
  mat d_w;
  if (want_gradient) {
    d_act.resize(rows, k_count * w);
    d_w.resize(rows, k_count);
  }

  vec x(d);
  vec g(d);
  vec wk(k_count);
  vec co(k_count);
  vec si(k_count);
  // particle block before each map
  mat before(n, k_count);

  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index k = 0; k < k_count; ++k) {
      wk(k) = packed.output.row(k).dot(act.row(r).segment(k * w, w)) + packed.output_bias(k);
      const real theta = wk(k) * t_star;
      co(k) = std::cos(theta);
      si(k) = std::sin(theta);
    }
    x = x0.row(r).transpose();
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const auto& desc = maps[static_cast<std::size_t>(k)];
      real* blk = x.data() + static_cast<Eigen::Index>(desc.particle) * n;
      if (want_gradient) before.col(k) = Eigen::Map<const vec>(blk, n);
      const real theta = wk(k) * t_star;
      if (group.kind == group_kind::se3 && desc.kind == map_kind::shear) {
        detail::apply_block(group, desc, theta, blk);
      } else {
        detail::rotate(blk, desc.component, co(k), si(k));
        if (group.kind == group_kind::se3) detail::rotate(blk + 3, desc.component, co(k), si(k));
      }
    }
    g = x - end.row(r0 + r).transpose();
    out.loss += g.squaredNorm();
    if (!want_gradient) continue;

    g *= 2.0;
    for (Eigen::Index k = k_count - 1; k >= 0; --k) {
      const auto& desc = maps[static_cast<std::size_t>(k)];
      real* gb = g.data() + static_cast<Eigen::Index>(desc.particle) * n;
      const real dl_dw = t_star * block_derivative_form(group, desc, co(k), si(k), gb, before.col(k).data());
      d_w(r, k) = dl_dw;
      block_transpose(group, desc, wk(k) * t_star, co(k), si(k), gb);
    }
    for (Eigen::Index k = 0; k < k_count; ++k)
      for (Eigen::Index j = 0; j < w; ++j) {
        const real a = act(r, k * w + j);
        d_act(r, k * w + j) = d_w(r, k) * packed.output(k, j) * (1.0 - a * a);
      }
  }

  if (want_gradient) {
    out.d_hidden = d_act.transpose() * x0;
    out.d_hidden_bias = d_act.colwise().sum().transpose();
    out.d_output.resize(k_count, w);
    for (Eigen::Index k = 0; k < k_count; ++k)
      out.d_output.row(k) = d_w.col(k).transpose() * act.middleCols(k * w, w);
    out.d_output_bias = d_w.colwise().sum().transpose();
  }
  return out;
}

void check_pairs(const colpnet& model, const sample_matrix& begin, const sample_matrix& end) {
  if (begin.cols() != model.state_size() || end.cols() != model.state_size())
    throw dimension_error("colpnet: pair width " + std::to_string(begin.cols()) + " does not match model state size " +
                          std::to_string(model.state_size()));
  if (begin.rows() != end.rows()) throw dimension_error("colpnet: begin and end have different row counts");
  if (begin.rows() == 0) throw error("colpnet: no training pairs");
}

loss_and_gradient batched(const colpnet& model, const sample_matrix& begin, const sample_matrix& end,
                          bool want_gradient) {
  check_pairs(model, begin, end);
  const packed_nets packed(model);
  const Eigen::Index rows = begin.rows();
  const std::size_t chunks = static_cast<std::size_t>((rows + chunk_rows - 1) / chunk_rows);
  std::vector<chunk_result> results(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(c) * chunk_rows;
    results[c] = run_chunk(model, packed, begin, end, r0, std::min(chunk_rows, rows - r0), want_gradient);
  });

  loss_and_gradient out;
  for (const auto& r : results) out.loss += r.loss;
  if (!want_gradient) return out;

  chunk_result total = results.front();
  for (std::size_t c = 1; c < chunks; ++c) {
    total.d_hidden += results[c].d_hidden;
    total.d_hidden_bias += results[c].d_hidden_bias;
    total.d_output += results[c].d_output;
    total.d_output_bias += results[c].d_output_bias;
  }

  const Eigen::Index w = model.width();
  const Eigen::Index d = model.state_size();
  const Eigen::Index per = model.parameters_per_net();
  out.gradient.resize(model.parameter_count());
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(model.num_maps()); ++k) {
    Eigen::Index o = k * per;
    for (Eigen::Index j = 0; j < w; ++j)
      for (Eigen::Index c = 0; c < d; ++c) out.gradient(o++) = total.d_hidden(k * w + j, c);
    out.gradient.segment(o, w) = total.d_hidden_bias.segment(k * w, w);
    o += w;
    out.gradient.segment(o, w) = total.d_output.row(k).transpose();
    o += w;
    out.gradient(o) = total.d_output_bias(k);
  }
  return out;
}

}  // namespace

real loss(const colpnet& model, const sample_matrix& begin, const sample_matrix& end) {
  return batched(model, begin, end, false).loss;
}

real loss(const colpnet& model, const pair_set& pairs) { return loss(model, pairs.begin, pairs.end); }

loss_and_gradient grad_loss(const colpnet& model, const sample_matrix& begin, const sample_matrix& end) {
  return batched(model, begin, end, true);
}

loss_and_gradient grad_loss(const colpnet& model, const pair_set& pairs) {
  return grad_loss(model, pairs.begin, pairs.end);
}

// ---- optimisation ----

void adam_step(vec& params, const vec& grads, adam_state& state, const adam_config& config) {
  if (grads.size() != params.size()) throw dimension_error("adam_step: gradient and parameters differ in length");
  if (state.m.size() != params.size()) state = adam_state(params.size());
  ++state.step;
  state.m = config.beta1 * state.m + (1.0 - config.beta1) * grads;
  state.v = config.beta2 * state.v + (1.0 - config.beta2) * grads.cwiseProduct(grads);
  const real c1 = 1.0 - std::pow(config.beta1, static_cast<real>(state.step));
  const real c2 = 1.0 - std::pow(config.beta2, static_cast<real>(state.step));
  params.array() -= config.learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + config.epsilon);
}

train_result train(colpnet model, const sample_matrix& begin, const sample_matrix& end, const train_config& config,
                   const epoch_callback& on_epoch) {
  if (config.epochs < 0) throw error("train: epochs must be non-negative");
  if (!(config.adam.learning_rate > 0.0)) throw error("train: learning rate must be positive");
  check_pairs(model, begin, end);
  const real m = static_cast<real>(begin.rows());

  vec params = model.parameters();
  adam_state state(params.size());
  std::vector<real> history;
  history.reserve(static_cast<std::size_t>(config.epochs) + 1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto lg = grad_loss(model, begin, end);
    const real mean = lg.loss / m;
    if (!std::isfinite(mean) || !lg.gradient.allFinite())
      throw error("train: non-finite loss at epoch " + std::to_string(epoch));
    history.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
    adam_step(params, lg.gradient, state, config.adam);
    model.set_parameters(params);
  }
  const real final_mean = loss(model, begin, end) / m;
  if (!std::isfinite(final_mean)) throw error("train: non-finite loss at epoch " + std::to_string(config.epochs));
  history.push_back(final_mean);
  if (on_epoch) on_epoch(config.epochs, final_mean);

  model.info.epochs_trained += config.epochs;
  model.info.learning_rate = config.adam.learning_rate;
  model.info.final_loss = final_mean;
  return {std::move(model), std::move(history)};
}

train_result train(colpnet model, const pair_set& pairs, const train_config& config, const epoch_callback& on_epoch) {
  model.info.topology = std::string(to_string(pairs.config.topo));
  model.info.chi = pairs.config.chi;
  model.info.data_seed = pairs.config.seed;
  return train(std::move(model), pairs.begin, pairs.end, config, on_epoch);
}

// ---- rollout and evaluation ----

trajectory reconstruct(const colpnet& model, const phase_state& initial, int num_steps) {
  if (!(initial.group == model.group()) || initial.num_particles != model.num_particles())
    throw dimension_error("reconstruct: initial state does not match the model");
  if (num_steps < 0) throw error("reconstruct: num_steps must be non-negative");
  trajectory t;
  t.group = model.group();
  t.num_particles = model.num_particles();
  t.dt = model.delta_t();
  t.description = "learned";
  t.states.reserve(static_cast<std::size_t>(num_steps) + 1);
  t.states.push_back(initial.mu);
  for (int s = 0; s < num_steps; ++s) {
    t.states.push_back(step(model, t.states.back()));
    if (!t.states.back().allFinite()) throw error("reconstruct: non-finite state at step " + std::to_string(s + 1));
  }
  return t;
}

real evaluation_report::mean_mae() const {
  if (mae.empty()) return 0.0;
  real s = 0.0;
  for (real v : mae) s += v;
  return s / static_cast<real>(mae.size());
}

real evaluation_report::worst_learned_casimir_drift() const {
  real w = 0.0;
  for (const auto& r : runs) w = std::max(w, r.learned_diagnostics.worst_relative_casimir_deviation());
  return w;
}

real evaluation_report::worst_ground_casimir_drift() const {
  real w = 0.0;
  for (const auto& r : runs) w = std::max(w, r.ground_diagnostics.worst_relative_casimir_deviation());
  return w;
}

real evaluation_report::worst_ground_energy_drift() const {
  real w = 0.0;
  for (const auto& r : runs) w = std::max(w, r.ground_diagnostics.max_relative_energy_deviation);
  return w;
}

evaluation_report evaluate(const colpnet& model, const control_model& ground_model,
                           const std::vector<phase_state>& initials, int num_steps,
                           const integrator_config& integrator) {
  if (!(ground_model.group() == model.group()) || ground_model.num_particles() != model.num_particles())
    throw dimension_error("evaluate: ground-truth model does not match the learned model");
  if (initials.empty()) throw error("evaluate: no initial states");
  if (num_steps < 1) throw error("evaluate: num_steps must be at least 1");

  evaluation_report report;
  report.runs.resize(initials.size());
  parallel_for(initials.size(), [&](std::size_t i) {
    auto& run = report.runs[i];
    run.ground_truth = integrate(ground_model, initials[i], integrator, num_steps + 1);
    run.learned = reconstruct(model, initials[i], num_steps);
    run.ground_diagnostics = diagnostics(ground_model, run.ground_truth);
    run.learned_diagnostics = diagnostics(ground_model, run.learned);
  });

  report.mae.assign(static_cast<std::size_t>(num_steps) + 1, 0.0);
  const real denom = static_cast<real>(initials.size()) * static_cast<real>(model.state_size());
  for (const auto& run : report.runs)
    for (std::size_t s = 0; s < report.mae.size(); ++s)
      report.mae[s] += (run.learned.states[s] - run.ground_truth.states[s]).cwiseAbs().sum() / denom;
  return report;
}

energy_halves energy_deviation_halves(const std::vector<real>& energy) {
  energy_halves h;
  if (energy.empty()) return h;
  const std::size_t mid = energy.size() / 2;
  for (std::size_t i = 0; i < energy.size(); ++i) {
    const real dev = std::abs(energy[i] - energy.front());
    (i < mid ? h.first : h.second) = std::max(i < mid ? h.first : h.second, dev);
  }
  return h;
}

}  // namespace colp
