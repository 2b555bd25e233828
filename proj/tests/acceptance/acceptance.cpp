// Acceptance harness: one PASS/FAIL line per criterion.
// Usage: acceptance [--only N]...   (exit code 1 if any selected criterion fails)

#include "colp/colpnet.hpp"
#include "colp/control.hpp"
#include "colp/dataset.hpp"
#include "colp/integrator.hpp"
#include "colp/lie.hpp"
#include "colp/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace colp;
namespace fs = std::filesystem;

namespace {

struct outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [FAIL]");
  }
};

std::string fmt(real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

real relative_error(const vec& a, const vec& b) {
  return (a - b).norm() / std::max(1e-300, std::max(a.norm(), b.norm()));
}

vec random_vec(rng& gen, Eigen::Index n) {
  vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gen.uniform(-1.0, 1.0);
  return v;
}

const topology& topo_of(topology_kind k) {
  static const topology dict = topology::dictatorship();
  static const topology dem = topology::democracy();
  return k == topology_kind::dictatorship ? dict : dem;
}

// 1
outcome parameter_counts() {
  outcome o;
  for (auto [kind, per, total] : {std::tuple{group_kind::so3, 34, 306}, std::tuple{group_kind::se3, 61, 1098}}) {
    const auto g = group_spec::of(kind);
    const colpnet m(g, 3, map_schedule::standard(g, 3, 0.1), 3);
    o.require(m.parameters_per_net() == per && m.parameter_count() == total,
              std::string(to_string(kind)) + " " + std::to_string(m.parameters_per_net()) + "/" +
                  std::to_string(m.parameter_count()));
  }
  return o;
}

// 2
outcome ground_truth_invariants() {
  outcome o;
  for (group_kind kind : {group_kind::so3, group_kind::se3})
    for (topology_kind tk : {topology_kind::dictatorship, topology_kind::democracy}) {
      dataset_config c = dataset_config::defaults(kind);
      c.topo = tk;
      const auto model = c.make_model();
      const auto integ = c.make_integrator();
      rng gen(c.seed);
      real cas = 0.0, en = 0.0;
      for (int t = 0; t < c.num_trajectories; ++t) {
        const auto d = diagnostics(model, integrate(model, sample_initial(c, gen), integ, c.points_per_trajectory));
        cas = std::max(cas, d.worst_relative_casimir_deviation());
        en = std::max(en, d.max_relative_energy_deviation);
      }
      o.require(cas <= 1e-12 && en <= 1e-12, std::string(to_string(kind)) + "/" + std::string(to_string(tk)) +
                                                 " C " + fmt(cas) + " h " + fmt(en));
    }
  return o;
}

// 3
outcome psi_cross_check() {
  outcome o;
  real worst_solve = 0.0, worst_rows = 0.0;
  for (topology_kind tk : {topology_kind::dictatorship, topology_kind::democracy})
    for (int n = 2; n <= 8; ++n)
      for (real chi : {0.0, 0.1, 0.5, 2.0}) {
        const mat closed = psi_closed_form(topo_of(tk), n, chi);
        worst_solve = std::max(worst_solve, (closed - psi_solve(topo_of(tk), n, chi)).cwiseAbs().maxCoeff());
        worst_rows = std::max(worst_rows, (closed.rowwise().sum().array() - 1.0).abs().maxCoeff());
      }
  o.require(worst_solve <= 1e-13, "closed vs solve " + fmt(worst_solve));
  o.require(worst_rows <= 1e-13, "row sums " + fmt(worst_rows));
  mat dem(3, 3), dict(3, 3);
  dem << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  dict << 0.5, 0.25, 0.25, 0.25, 0.625, 0.125, 0.25, 0.125, 0.625;
  const real hand = std::max((psi_closed_form(topo_of(topology_kind::democracy), 3, 0.5) - dem).cwiseAbs().maxCoeff(),
                             (psi_closed_form(topo_of(topology_kind::dictatorship), 3, 0.5) - dict).cwiseAbs().maxCoeff());
  o.require(hand <= 1e-15, "hand values " + fmt(hand));
  return o;
}

// 4
outcome hamiltonian_equivalence() {
  outcome o;
  rng gen(2024);
  for (group_kind kind : {group_kind::so3, group_kind::se3})
    for (topology_kind tk : {topology_kind::dictatorship, topology_kind::democracy}) {
      const control_model m(group_spec::of(kind), topo_of(tk), 3, 0.5);
      real worst = 0.0;
      for (int t = 0; t < 1000; ++t) {
        const vec mu = random_vec(gen, m.state_size());
        worst = std::max(worst, std::abs(m.hamiltonian(mu) - oracles::explicit_hamiltonian(kind, tk, 3, 0.5, mu)));
      }
      o.require(worst <= 1e-13, std::string(to_string(kind)) + "/" + std::string(to_string(tk)) + " " + fmt(worst));
    }
  return o;
}

// 5
outcome gradient_correctness() {
  outcome o;
  rng gen(5);
  real worst_h = 0.0;
  for (group_kind kind : {group_kind::so3, group_kind::se3})
    for (topology_kind tk : {topology_kind::dictatorship, topology_kind::democracy}) {
      const control_model m(group_spec::of(kind), topo_of(tk), 3, 0.5);
      for (int t = 0; t < 20; ++t) {
        const vec mu = random_vec(gen, m.state_size());
        const vec fd = oracles::fd_gradient([&](const vec& x) { return m.hamiltonian(x); }, mu);
        worst_h = std::max(worst_h, relative_error(m.grad_hamiltonian(phase_state(m.group(), 3, mu)), fd));
      }
    }
  o.require(worst_h <= 1e-6, "grad h " + fmt(worst_h));

  const auto g = group_spec::so3();
  const auto model = colpnet::random(g, 2, map_schedule::standard(g, 2, 0.1), 3, 0.5, 17);
  sample_matrix begin(5, 6), end(5, 6);
  for (int r = 0; r < 5; ++r) {
    begin.row(r) = random_vec(gen, 6).transpose();
    end.row(r) = random_vec(gen, 6).transpose();
  }
  const vec analytic = grad_loss(model, begin, end).gradient;
  const vec fd = oracles::fd_gradient(
      [&](const vec& p) {
        auto q = model;
        q.set_parameters(p);
        return loss(q, begin, end);
      },
      model.parameters());
  const real e = relative_error(analytic, fd);
  o.require(model.num_maps() == 6 && e <= 1e-6, "grad loss " + fmt(e));
  return o;
}

// 6
outcome learned_map_casimirs() {
  outcome o;
  rng gen(6);
  for (group_kind kind : {group_kind::so3, group_kind::se3}) {
    const auto g = group_spec::of(kind);
    real worst = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto m = colpnet::random(g, 3, map_schedule::standard(g, 3, 0.1), 3, 0.5, seed);
      const auto traj = reconstruct(m, phase_state(g, 3, random_vec(gen, m.state_size())), 1000);
      const control_model ground(g, topology::democracy(), 3, 0.5);
      worst = std::max(worst, diagnostics(ground, traj).worst_relative_casimir_deviation());
    }
    o.require(worst <= 1e-10, std::string(to_string(kind)) + " " + fmt(worst));
  }
  return o;
}

struct trained_case {
  std::vector<real> history;
  evaluation_report report;
};

trained_case train_and_evaluate(group_kind kind, int epochs) {
  // same defaults as the command-line tool
  dataset_config c = dataset_config::defaults(kind);
  c.seed = 42;
  const pair_set pairs = generate(c);
  const auto schedule = map_schedule::standard(c.group, c.num_particles, c.dt);
  train_config tc;
  tc.epochs = epochs;
  tc.seed = 1;
  const auto model = colpnet::glorot(c.group, c.num_particles, schedule, 3, tc.seed);
  auto result = train(model, pairs, tc);

  rng gen(derive_seed(7, 0x6576616c));
  std::vector<phase_state> initials;
  for (int i = 0; i < 10; ++i) initials.emplace_back(c.group, c.num_particles, random_vec(gen, c.state_size()));
  const int steps = kind == group_kind::so3 ? 1000 : 200;
  return {std::move(result.history), evaluate(result.model, c.make_model(), initials, steps, c.make_integrator())};
}

real mae_first_100(const evaluation_report& r) {
  real s = 0.0;
  for (std::size_t i = 1; i <= 100; ++i) s += r.mae[i];
  return s / 100.0;
}

int bounded_runs(const evaluation_report& r) {
  int n = 0;
  for (const auto& run : r.runs) {
    const auto h = energy_deviation_halves(run.learned_diagnostics.energy);
    if (h.second <= 2.0 * h.first) ++n;
  }
  return n;
}

// 7
outcome training_reproduction() {
  outcome o;
  const auto so3 = train_and_evaluate(group_kind::so3, 10000);
  const auto& h = so3.history;
  o.require(h[1000] <= 1e-3, "so3 loss@1000 " + fmt(h[1000]));
  bool monotone = true;
  real prev = std::numeric_limits<real>::infinity();
  for (int w = 0; w < 10; ++w) {
    real mean = 0.0;
    for (int e = 100 * w; e < 100 * (w + 1); ++e) mean += h[static_cast<std::size_t>(e)] / 100.0;
    monotone = monotone && mean < prev;
    prev = mean;
  }
  o.require(monotone, "so3 100-epoch window means decreasing");
  o.require(h.back() <= 1e-5, "so3 loss@10000 " + fmt(h.back()));
  o.require(mae_first_100(so3.report) <= 0.05, "so3 100-step MAE " + fmt(mae_first_100(so3.report)));
  const int so3_bounded = bounded_runs(so3.report);
  o.require(so3_bounded == 10, "so3 energy bounded " + std::to_string(so3_bounded) + "/10");

  const auto se3 = train_and_evaluate(group_kind::se3, 10000);
  const real drop = std::log10(se3.history.front() / se3.history.back());
  o.require(drop >= 4.0, "se3 loss " + fmt(se3.history.front()) + " -> " + fmt(se3.history.back()) + " (" +
                             fmt(drop) + " orders)");
  o.require(mae_first_100(se3.report) <= 0.05, "se3 100-step MAE " + fmt(mae_first_100(se3.report)));
  const int se3_bounded = bounded_runs(se3.report);
  o.require(se3_bounded == 10, "se3 energy bounded " + std::to_string(se3_bounded) + "/10");
  return o;
}

// 8
outcome integrator_order() {
  outcome o;
  const auto m = single_particle_so3();
  const vec mu0 = vec3(0.6, -0.4, 0.8);
  auto run = [&](int sub) {
    integrator_config c;
    c.dt_output = 1.0;
    c.substeps = sub;
    return advance(m, mu0, c);
  };
  const vec h1 = run(16), h2 = run(32), h4 = run(64);
  // Richardson: the ratio of successive differences removes the unknown exact value
  const real order = oracles::order_estimate((h1 - h2).norm(), (h2 - h4).norm());
  o.require(order >= 1.8 && order <= 2.2, "order " + fmt(order));
  return o;
}

// 9
outcome single_particle_oracles() {
  outcome o;
  integrator_config c;
  c.dt_output = 0.01;
  c.substeps = 10;
  const auto traj =
      integrate(single_particle_so3(), phase_state(group_spec::so3(), 1, vec3(0.5, 0.3, -0.7)), c, 1001);
  const real res = oracles::single_particle_reduction_residual(traj);
  o.require(res <= 1e-4, "so3 reduction residual " + fmt(res));

  vector<real, 6> mu;
  mu << 0.4, -0.6, 0.0, 0.9, 0.2, -0.5;
  const auto t2 = integrate(single_particle_se3_mu6_drift(), phase_state(group_spec::se3(), 1, mu),
                            integrator_config{}, 201);
  real worst = 0.0;
  for (const auto& s : t2.states) worst = std::max(worst, std::abs(s(2)));
  o.require(worst <= 1e-13, "se3 max |mu_3| " + fmt(worst));
  return o;
}

// 10
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + COLPNETS_BINARY + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

outcome determinism() {
  outcome o;
  const fs::path root = fs::temp_directory_path() / "colp_acceptance_determinism";
  fs::remove_all(root);
  for (const char* r : {"a", "b"}) {
    const std::string base = (root / r).string();
    const bool ok = run_cli("generate --group se3 --trajectories 10 --points 11 --seed 42 --out " + base + "/data") == 0 &&
                    run_cli("train --data " + base + "/data --epochs 200 --seed 1 --out " + base + "/model") == 0 &&
                    run_cli("evaluate --model " + base + "/model --num-initials 3 --steps 50 --seed 7 --out " + base +
                            "/eval") == 0;
    o.require(ok, std::string("pipeline run ") + r);
    if (!ok) return o;
  }
  int compared = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file() || entry.path().filename() == "run_manifest.json") continue;
    const fs::path other = root / "b" / fs::relative(entry.path(), root / "a");
    ++compared;
    if (slurp(entry.path()) != slurp(other)) ++differing;
  }
  o.require(compared >= 10 && differing == 0,
            std::to_string(compared - differing) + "/" + std::to_string(compared) + " files identical");
  fs::remove_all(root);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]...\n");
      return 2;
    }
  }
  const std::vector<std::pair<std::string, std::function<outcome()>>> criteria = {
      {"parameter counts", parameter_counts},
      {"ground-truth invariants", ground_truth_invariants},
      {"Psi cross-check", psi_cross_check},
      {"Hamiltonian equivalence", hamiltonian_equivalence},
      {"gradient correctness", gradient_correctness},
      {"learned-map Casimirs", learned_map_casimirs},
      {"training reproduction", training_reproduction},
      {"integrator order", integrator_order},
      {"single-particle oracles", single_particle_oracles},
      {"determinism", determinism},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::printf("%s  %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
