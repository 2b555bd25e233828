#include "commands.hpp"

#include "colp/colpnet.hpp"
#include "colp/dataset.hpp"
#include "colp/io.hpp"
#include "colp/lie.hpp"
#include "colp/rng.hpp"
#include "colp/svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <string>

namespace colp::cli {

using json = nlohmann::json;

namespace {

// separates evaluation initial states from any training seed
constexpr std::uint64_t evaluation_stream = 0x6576616c;

class run_manifest {
public:
  explicit run_manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["tool_version"] = tool_version;
    doc_["parameters"] = json::object();
    doc_["inputs"] = json::array();
    doc_["outputs"] = json::array();
    doc_["seeds"] = json::object();
  }

  json& parameters() { return doc_["parameters"]; }
  json& seeds() { return doc_["seeds"]; }
  void input(const std::filesystem::path& p) { doc_["inputs"].push_back(p.string()); }
  void output(const std::filesystem::path& p) { doc_["outputs"].push_back(p.string()); }

  void write(const std::filesystem::path& dir) {
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    doc_["wall_clock_seconds"] = elapsed;
    write_file_atomic(dir / "run_manifest.json", doc_.dump(2) + "\n");
  }

private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

std::filesystem::path resolve_model_path(const std::filesystem::path& p) {
  return std::filesystem::is_directory(p) ? p / "model.json" : p;
}

std::string csv_row(std::initializer_list<std::string> head, const vec& values) {
  std::string line;
  bool first = true;
  for (const auto& h : head) {
    if (!first) line += ',';
    line += h;
    first = false;
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) (line += ',') += format_real(values(i));
  line += '\n';
  return line;
}

vec to_vec(const std::vector<real>& v) { return Eigen::Map<const vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

// ---- generate ----

int run_generate(const generate_options& opt) {
  run_manifest manifest("generate");
  dataset_config c = dataset_config::defaults(parse_group(opt.group));
  c.topo = parse_topology(opt.topology);
  c.num_particles = opt.particles;
  c.chi = opt.chi;
  c.dt = opt.dt;
  if (opt.trajectories > 0) c.num_trajectories = opt.trajectories;
  c.points_per_trajectory = opt.points;
  c.seed = opt.seed;
  c.ic_box = opt.ic_box;
  c.substeps = opt.substeps;
  c.validate();

  const pair_set pairs = generate(c);
  save(pairs, opt.out);

  manifest.parameters() = {{"group", opt.group},          {"topology", opt.topology}, {"particles", c.num_particles},
                           {"chi", c.chi},                {"dt", c.dt},               {"trajectories", c.num_trajectories},
                           {"points", c.points_per_trajectory}, {"ic_box", c.ic_box}, {"substeps", c.substeps}};
  manifest.seeds()["data"] = c.seed;
  manifest.output(opt.out / "manifest.json");
  manifest.output(opt.out / "pairs.csv");
  manifest.write(opt.out);

  std::cout << "generated M=" << pairs.rows() << " pairs, group=" << to_string(c.group.kind)
            << ", topology=" << to_string(c.topo) << ", N=" << c.num_particles << ", state size=" << c.state_size()
            << " -> " << opt.out.string() << "\n";
  return 0;
}

// ---- train ----

int run_train(const train_options& opt) {
  run_manifest manifest("train");
  const pair_set pairs = load(opt.data);
  const auto& dc = pairs.config;
  map_schedule schedule = map_schedule::standard(dc.group, dc.num_particles, dc.dt, opt.passes);
  colpnet model = opt.init == "glorot"
                      ? colpnet::glorot(dc.group, dc.num_particles, std::move(schedule), opt.width, opt.seed)
                      : colpnet::random(dc.group, dc.num_particles, std::move(schedule), opt.width, opt.init_scale, opt.seed);

  std::cout << "training on " << pairs.rows() << " pairs: " << model.num_maps() << " maps, "
            << model.parameters_per_net() << " parameters per net, " << model.parameter_count() << " total\n";

  train_config tc;
  tc.adam.learning_rate = opt.lr;
  tc.epochs = opt.epochs;
  tc.init_scale = opt.init_scale;
  tc.seed = opt.seed;
  const int report_every = std::max(1, opt.epochs / 10);
  auto result = train(std::move(model), pairs, tc, [&](int epoch, real mean) {
    if (epoch % report_every == 0 || epoch == opt.epochs)
      std::cout << "epoch " << epoch << "  loss " << format_real(mean) << "\n" << std::flush;
  });

  std::filesystem::create_directories(opt.out);
  save_model(result.model, opt.out / "model.json");
  std::string loss_csv = "epoch,loss\n";
  for (std::size_t i = 0; i < result.history.size(); ++i)
    loss_csv += std::to_string(i) + "," + format_real(result.history[i]) + "\n";
  write_file_atomic(opt.out / "loss.csv", loss_csv);

  manifest.parameters() = {{"epochs", opt.epochs},         {"lr", opt.lr},
                           {"width", opt.width},           {"passes", opt.passes},
                           {"init", opt.init}, {"init_scale", opt.init_scale}, {"parameters", result.model.parameter_count()}};
  manifest.seeds()["init"] = opt.seed;
  manifest.seeds()["data"] = dc.seed;
  manifest.input(opt.data);
  manifest.output(opt.out / "model.json");
  manifest.output(opt.out / "loss.csv");
  manifest.write(opt.out);

  std::cout << "final mean loss " << format_real(result.history.back()) << " (" << result.model.parameter_count()
            << " parameters) -> " << opt.out.string() << "\n";
  return 0;
}

// ---- evaluate ----

namespace {

struct ground_setup {
  topology_kind topo;
  real chi;
  real dt;
  int substeps;
};

std::vector<svg::panel> trajectory_panels(const evaluation_run& run, const group_spec& group, int num_particles) {
  std::vector<svg::panel> panels;
  const int shown = std::min(group.dim, 3);
  for (int k = 0; k < num_particles; ++k)
    for (int i = 0; i < shown; ++i) {
      svg::panel p;
      p.title = "mu_" + std::to_string(k + 1) + std::to_string(i + 1);
      svg::series gt{"ground truth", svg::ground_color, {}, {}};
      svg::series nn{"learned", svg::learned_color, {}, {}};
      const Eigen::Index idx = static_cast<Eigen::Index>(k) * group.dim + i;
      for (const auto& s : run.ground_truth.states) gt.y.push_back(s(idx));
      for (const auto& s : run.learned.states) nn.y.push_back(s(idx));
      p.lines = {std::move(gt), std::move(nn)};
      panels.push_back(std::move(p));
    }
  return panels;
}

std::vector<svg::panel> diagnostic_panels(const evaluation_run& run, const std::vector<real>& mae,
                                          const group_spec& group, int num_particles) {
  std::vector<svg::panel> panels;
  const int per = group.casimirs_per_particle();
  for (int k = 0; k < num_particles; ++k)
    for (int c = 0; c < per; ++c) {
      const std::size_t slot = static_cast<std::size_t>(k * per + c);
      svg::panel p;
      p.title = "Casimir " + std::string(per == 1 ? "" : (c == 0 ? "C1 " : "C2 ")) + "deviation, particle " +
                std::to_string(k + 1);
      svg::series gt{"ground truth", svg::ground_color, {}, {}};
      svg::series nn{"learned", svg::learned_color, {}, {}};
      for (const auto& v : run.ground_diagnostics.casimirs) gt.y.push_back(v[slot] - run.ground_diagnostics.casimirs[0][slot]);
      for (const auto& v : run.learned_diagnostics.casimirs) nn.y.push_back(v[slot] - run.learned_diagnostics.casimirs[0][slot]);
      p.lines = {std::move(gt), std::move(nn)};
      panels.push_back(std::move(p));
    }
  svg::panel energy;
  energy.title = "energy deviation h(t) - h(0)";
  svg::series gt{"ground truth", svg::ground_color, {}, {}};
  svg::series nn{"learned", svg::learned_color, {}, {}};
  for (real h : run.ground_diagnostics.energy) gt.y.push_back(h - run.ground_diagnostics.energy.front());
  for (real h : run.learned_diagnostics.energy) nn.y.push_back(h - run.learned_diagnostics.energy.front());
  energy.lines = {std::move(gt), std::move(nn)};
  panels.push_back(std::move(energy));
  svg::panel err;
  err.title = "MAE over all initials";
  err.lines = {{"learned vs ground truth", svg::learned_color, mae, {}}};
  panels.push_back(std::move(err));
  return panels;
}

}  // namespace

int run_evaluate(const evaluate_options& opt) {
  run_manifest manifest("evaluate");
  const auto model_path = resolve_model_path(opt.model);
  const colpnet model = load_model(model_path);
  manifest.input(model_path);

  ground_setup gs{};
  if (!opt.data.empty()) {
    const dataset_config dc = load_manifest(opt.data);
    manifest.input(opt.data / "manifest.json");
    if (dc.group.kind != model.group().kind || dc.num_particles != model.num_particles())
      throw error("evaluate: dataset (" + std::string(to_string(dc.group.kind)) + ", N=" +
                  std::to_string(dc.num_particles) + ") does not match model (" +
                  std::string(to_string(model.group().kind)) + ", N=" + std::to_string(model.num_particles()) + ")");
    if (std::abs(dc.dt - model.delta_t()) > 1e-15 * std::max(1.0, dc.dt))
      throw error("evaluate: dataset dt does not match the model's map time");
    gs = {dc.topo, dc.chi, dc.dt, dc.substeps};
  } else {
    if (model.info.topology != "dictatorship" && model.info.topology != "democracy")
      throw error("evaluate: model has no recorded topology; pass --data");
    gs = {parse_topology(model.info.topology), model.info.chi, model.delta_t(), 100};
  }
  if (opt.substeps > 0) gs.substeps = opt.substeps;

  const group_spec group = model.group();
  const int n_particles = model.num_particles();
  const int steps = opt.steps > 0 ? opt.steps : (group.kind == group_kind::so3 ? 1000 : 200);
  const control_model ground(group,
                             gs.topo == topology_kind::dictatorship ? topology::dictatorship() : topology::democracy(),
                             n_particles, gs.chi);
  integrator_config integ;
  integ.dt_output = gs.dt;
  integ.substeps = gs.substeps;

  rng gen(derive_seed(opt.seed, evaluation_stream));
  std::vector<phase_state> initials;
  for (int i = 0; i < opt.num_initials; ++i) {
    vec mu(model.state_size());
    for (Eigen::Index j = 0; j < mu.size(); ++j) mu(j) = gen.uniform(-opt.ic_box, opt.ic_box);
    initials.emplace_back(group, n_particles, std::move(mu));
  }

  const evaluation_report report = evaluate(model, ground, initials, steps, integ);

  std::filesystem::create_directories(opt.out);
  const auto out = [&](const char* name) {
    manifest.output(opt.out / name);
    return opt.out / name;
  };

  // series CSVs
  const Eigen::Index d = model.state_size();
  std::string traj_csv = "run,step,source";
  for (Eigen::Index i = 0; i < d; ++i) traj_csv += ",mu_" + std::to_string(i);
  traj_csv += '\n';
  const int per = group.casimirs_per_particle();
  std::string cas_csv = "run,step,source";
  for (int k = 0; k < n_particles; ++k)
    for (int c = 0; c < per; ++c) cas_csv += ",dC_" + std::to_string(k) + "_" + std::to_string(c);
  cas_csv += '\n';
  std::string energy_csv = "run,step,ground_h,learned_h,ground_dh,learned_dh\n";
  for (std::size_t r = 0; r < report.runs.size(); ++r) {
    const auto& run = report.runs[r];
    const std::string rs = std::to_string(r);
    for (std::size_t s = 0; s <= static_cast<std::size_t>(steps); ++s) {
      const std::string ss = std::to_string(s);
      traj_csv += csv_row({rs, ss, "ground"}, run.ground_truth.states[s]);
      traj_csv += csv_row({rs, ss, "learned"}, run.learned.states[s]);
      vec dg = to_vec(run.ground_diagnostics.casimirs[s]) - to_vec(run.ground_diagnostics.casimirs[0]);
      vec dl = to_vec(run.learned_diagnostics.casimirs[s]) - to_vec(run.learned_diagnostics.casimirs[0]);
      cas_csv += csv_row({rs, ss, "ground"}, dg);
      cas_csv += csv_row({rs, ss, "learned"}, dl);
      const real hg = run.ground_diagnostics.energy[s];
      const real hl = run.learned_diagnostics.energy[s];
      energy_csv += rs + "," + ss + "," + format_real(hg) + "," + format_real(hl) + "," +
                    format_real(hg - run.ground_diagnostics.energy[0]) + "," +
                    format_real(hl - run.learned_diagnostics.energy[0]) + "\n";
    }
  }
  std::string mae_csv = "step,mae\n";
  for (std::size_t s = 0; s < report.mae.size(); ++s) mae_csv += std::to_string(s) + "," + format_real(report.mae[s]) + "\n";
  write_file_atomic(out("trajectories.csv"), traj_csv);
  write_file_atomic(out("casimir_deviation.csv"), cas_csv);
  write_file_atomic(out("energy.csv"), energy_csv);
  write_file_atomic(out("mae.csv"), mae_csv);

  // report
  const std::size_t horizon = std::min<std::size_t>(100, static_cast<std::size_t>(steps));
  real mae_horizon = 0.0;
  for (std::size_t s = 1; s <= horizon; ++s) mae_horizon += report.mae[s];
  mae_horizon /= static_cast<real>(horizon);

  json runs = json::array();
  int bounded_runs = 0;
  real worst_learned_abs_casimir = 0.0;
  for (const auto& run : report.runs) {
    const auto halves = energy_deviation_halves(run.learned_diagnostics.energy);
    const bool bounded = halves.second <= 2.0 * halves.first;
    bounded_runs += bounded ? 1 : 0;
    real abs_cas = 0.0;
    for (real v : run.learned_diagnostics.max_casimir_deviation) abs_cas = std::max(abs_cas, v);
    worst_learned_abs_casimir = std::max(worst_learned_abs_casimir, abs_cas);
    runs.push_back({{"initial", std::vector<real>(run.ground_truth.states[0].data(),
                                                  run.ground_truth.states[0].data() + d)},
                    {"learned_max_relative_casimir_drift", run.learned_diagnostics.worst_relative_casimir_deviation()},
                    {"ground_max_relative_casimir_drift", run.ground_diagnostics.worst_relative_casimir_deviation()},
                    {"ground_max_relative_energy_drift", run.ground_diagnostics.max_relative_energy_deviation},
                    {"learned_max_energy_deviation", run.learned_diagnostics.max_energy_deviation},
                    {"learned_energy_first_half_max_deviation", halves.first},
                    {"learned_energy_second_half_max_deviation", halves.second},
                    {"learned_energy_bounded", bounded},
                    {"final_mae", (run.learned.states.back() - run.ground_truth.states.back()).cwiseAbs().mean()}});
  }

  json doc;
  doc["schema_version"] = 1;
  doc["group"] = std::string(to_string(group.kind));
  doc["topology"] = std::string(to_string(gs.topo));
  doc["chi"] = gs.chi;
  doc["num_particles"] = n_particles;
  doc["dt"] = gs.dt;
  doc["substeps"] = gs.substeps;
  doc["steps"] = steps;
  doc["num_initials"] = opt.num_initials;
  doc["seed"] = opt.seed;
  doc["ic_box"] = opt.ic_box;
  doc["initial_state_note"] =
      "evaluation initial states are uniform in [-ic_box, ic_box]^(N n), drawn from a seed stream separate from "
      "the training data";
  doc["mae"] = {{"step_0", report.mae.front()},
                {"mean_steps_1_to_" + std::to_string(horizon), mae_horizon},
                {"mean_all_steps", report.mean_mae()},
                {"final", report.mae.back()}};
  doc["learned"] = {{"max_relative_casimir_drift", report.worst_learned_casimir_drift()},
                    {"max_abs_casimir_drift", worst_learned_abs_casimir},
                    {"energy_bounded_runs", bounded_runs}};
  doc["ground_truth"] = {{"max_relative_casimir_drift", report.worst_ground_casimir_drift()},
                         {"max_relative_energy_drift", report.worst_ground_energy_drift()}};
  doc["runs"] = runs;
  write_file_atomic(out("report.json"), doc.dump(2) + "\n");

  // charts for the first run
  const auto& first = report.runs.front();
  write_file_atomic(out("trajectory.svg"),
                    svg::render(trajectory_panels(first, group, n_particles), std::min(group.dim, 3),
                                "run 0: ground truth (blue) vs learned (red)"));
  write_file_atomic(out("diagnostics.svg"),
                    svg::render(diagnostic_panels(first, report.mae, group, n_particles), per == 1 ? 3 : 2,
                                "Casimirs, energy and MAE: ground truth (blue) vs learned (red)"));
  manifest.output(opt.out / "trajectory.svg");
  manifest.output(opt.out / "diagnostics.svg");

  manifest.parameters() = {{"num_initials", opt.num_initials}, {"steps", steps},        {"substeps", gs.substeps},
                           {"ic_box", opt.ic_box},             {"topology", to_string(gs.topo)}, {"chi", gs.chi}};
  manifest.seeds()["evaluation"] = opt.seed;
  manifest.write(opt.out);

  std::cout << "evaluated " << opt.num_initials << " initials over " << steps << " steps\n"
            << "  MAE mean over steps 1.." << horizon << ": " << format_real(mae_horizon) << "\n"
            << "  MAE final: " << format_real(report.mae.back()) << "\n"
            << "  learned max relative Casimir drift: " << format_real(report.worst_learned_casimir_drift()) << "\n"
            << "  ground max relative energy drift: " << format_real(report.worst_ground_energy_drift()) << "\n"
            << "  learned energy bounded in " << bounded_runs << "/" << report.runs.size() << " runs\n"
            << "  -> " << opt.out.string() << "\n";
  return 0;
}

}  // namespace colp::cli
