#include "commands.hpp"

#include "colp/colpnet.hpp"
#include "colp/lie.hpp"
#include "colp/oracles.hpp"
#include "colp/rng.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace colp::cli {

namespace {

struct check_result {
  bool passed;
  std::string detail;
};

struct check {
  std::string name;
  std::function<check_result()> run;
};

std::string sci(real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

vec random_vec(rng& gen, Eigen::Index n, real box = 1.0) {
  vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gen.uniform(-box, box);
  return v;
}

real relative_error(const vec& a, const vec& b) { return (a - b).norm() / std::max(1e-300, std::max(a.norm(), b.norm())); }

std::vector<check> build_checks(const selftest_options& opt) {
  std::vector<check> checks;
  const bool corrupt = opt.corrupt_gamma;

  for (group_kind kind : {group_kind::so3, group_kind::se3}) {
    const group_spec group = group_spec::of(kind);
    const std::string tag = std::string(to_string(kind));
    checks.push_back({"structure constants (" + tag + "): antisymmetry and Jacobi", [group, corrupt] {
                        auto gamma = make_structure_constants(group);
                        if (corrupt) gamma(2, 0, 1) = -gamma(2, 0, 1);
                        const real anti = antisymmetry_residual(gamma);
                        const real jac = jacobi_residual(gamma);
                        return check_result{anti <= 1e-15 && jac <= 1e-15,
                                            "antisymmetry " + sci(anti) + ", Jacobi " + sci(jac)};
                      }});
    checks.push_back({"Poisson tensor (" + tag + "): hat form matches structure constants", [group, corrupt] {
                        auto gamma = make_structure_constants(group);
                        if (corrupt) gamma(2, 0, 1) = -gamma(2, 0, 1);
                        rng gen(11);
                        real worst = 0.0;
                        for (int t = 0; t < 50; ++t) {
                          const phase_state s(group, 3, random_vec(gen, 3 * group.dim));
                          worst = std::max(worst, (poisson_tensor(s) - poisson_tensor_from_structure(s, gamma))
                                                      .cwiseAbs()
                                                      .maxCoeff());
                        }
                        return check_result{worst <= 1e-15, "max entry difference " + sci(worst)};
                      }});
  }

  checks.push_back({"Psi: closed form vs solve vs brute-force inverse", [] {
                      real worst = 0.0;
                      for (auto topo : {topology::dictatorship(), topology::democracy()})
                        for (int n = 2; n <= 8; ++n)
                          for (real chi : {0.0, 0.1, 0.5, 2.0}) {
                            const mat closed = psi_closed_form(topo, n, chi);
                            const mat solved = psi_solve(topo, n, chi);
                            const mat brute = oracles::brute_force_inverse(
                                mat::Identity(n, n) + 2.0 * chi * laplacian(topo, n));
                            worst = std::max({worst, (closed - solved).cwiseAbs().maxCoeff(),
                                              (closed - brute).cwiseAbs().maxCoeff(),
                                              (closed.rowwise().sum().array() - 1.0).abs().maxCoeff()});
                          }
                      return check_result{worst <= 1e-13, "max deviation " + sci(worst)};
                    }});

  checks.push_back({"Hamiltonian: quadratic form vs explicit expansion", [] {
                      rng gen(12);
                      real worst = 0.0;
                      for (group_kind kind : {group_kind::so3, group_kind::se3})
                        for (auto topo : {topology::dictatorship(), topology::democracy()}) {
                          const control_model m(group_spec::of(kind), topo, 3, 0.5);
                          for (int t = 0; t < 200; ++t) {
                            const vec mu = random_vec(gen, m.state_size());
                            worst = std::max(worst, std::abs(m.hamiltonian(mu) -
                                                             oracles::explicit_hamiltonian(kind, topo.kind, 3, 0.5, mu)));
                          }
                        }
                      return check_result{worst <= 1e-13, "max difference " + sci(worst)};
                    }});

  checks.push_back({"Hamiltonian gradient vs finite differences", [] {
                      rng gen(13);
                      real worst = 0.0;
                      for (group_kind kind : {group_kind::so3, group_kind::se3}) {
                        const control_model m(group_spec::of(kind), topology::dictatorship(), 3, 0.5);
                        for (int t = 0; t < 20; ++t) {
                          const phase_state s(m.group(), 3, random_vec(gen, m.state_size()));
                          const vec fd = oracles::fd_gradient([&](const vec& x) { return m.hamiltonian(x); }, s.mu);
                          worst = std::max(worst, relative_error(m.grad_hamiltonian(s), fd));
                        }
                      }
                      return check_result{worst <= 1e-8, "max relative error " + sci(worst)};
                    }});

  checks.push_back({"midpoint integrator: Casimir and energy preservation", [] {
                      rng gen(14);
                      real worst_c = 0.0;
                      real worst_h = 0.0;
                      for (group_kind kind : {group_kind::so3, group_kind::se3}) {
                        const control_model m(group_spec::of(kind), topology::democracy(), 3, 0.5);
                        const phase_state s(m.group(), 3, random_vec(gen, m.state_size()));
                        const auto traj = integrate(m, s, integrator_config{}, 11);
                        const auto d = diagnostics(m, traj);
                        worst_c = std::max(worst_c, d.worst_relative_casimir_deviation());
                        worst_h = std::max(worst_h, d.max_relative_energy_deviation);
                      }
                      return check_result{worst_c <= 1e-12 && worst_h <= 1e-12,
                                          "Casimir " + sci(worst_c) + ", energy " + sci(worst_h)};
                    }});

  checks.push_back({"midpoint integrator: observed order", [] {
                      const control_model m = single_particle_so3();
                      const phase_state s(group_spec::so3(), 1, vec3(0.6, -0.4, 0.8));
                      auto run = [&](int sub) {
                        integrator_config c;
                        c.dt_output = 0.5;
                        c.substeps = sub;
                        return advance(m, s.mu, c);
                      };
                      const vec ref = run(2048);
                      const real order = oracles::order_estimate((run(8) - ref).norm(), (run(16) - ref).norm());
                      return check_result{order >= 1.8 && order <= 2.2, "order " + sci(order)};
                    }});

  checks.push_back({"learned loss gradient vs finite differences", [] {
                      const group_spec g = group_spec::so3();
                      colpnet model = colpnet::random(g, 2, map_schedule::standard(g, 2, 0.1), 3, 0.5, 21);
                      rng gen(15);
                      sample_matrix b(5, 6);
                      sample_matrix e(5, 6);
                      for (Eigen::Index r = 0; r < 5; ++r) {
                        b.row(r) = random_vec(gen, 6).transpose();
                        e.row(r) = random_vec(gen, 6).transpose();
                      }
                      const vec analytic = grad_loss(model, b, e).gradient;
                      const vec p0 = model.parameters();
                      const vec fd = oracles::fd_gradient(
                          [&](const vec& p) {
                            colpnet probe = model;
                            probe.set_parameters(p);
                            return loss(probe, b, e);
                          },
                          p0);
                      const real err = relative_error(analytic, fd);
                      return check_result{err <= 1e-6, "relative error " + sci(err)};
                    }});

  checks.push_back({"learned map: Casimirs preserved over 1000 steps", [] {
                      real worst = 0.0;
                      for (group_kind kind : {group_kind::so3, group_kind::se3}) {
                        const group_spec g = group_spec::of(kind);
                        const colpnet model = colpnet::random(g, 3, map_schedule::standard(g, 3, 0.1), 3, 0.5, 22);
                        rng gen(16);
                        const phase_state s(g, 3, random_vec(gen, 3 * g.dim));
                        const auto traj = reconstruct(model, s, 1000);
                        const control_model m(g, topology::democracy(), 3, 0.5);
                        worst = std::max(worst, diagnostics(m, traj).worst_relative_casimir_deviation());
                      }
                      return check_result{worst <= 1e-10, "max relative drift " + sci(worst)};
                    }});

  if (!opt.quick)
    checks.push_back({"training: loss decreases on a small dataset", [] {
                        dataset_config c = dataset_config::defaults(group_kind::so3);
                        c.num_trajectories = 5;
                        c.points_per_trajectory = 21;
                        c.substeps = 20;
                        c.seed = 5;
                        const pair_set pairs = generate(c);
                        const group_spec g = c.group;
                        colpnet model = colpnet::random(g, 3, map_schedule::standard(g, 3, c.dt), 3, 0.1, 3);
                        train_config tc;
                        tc.epochs = 300;
                        const auto r = train(std::move(model), pairs, tc);
                        const real drop = r.history.front() / r.history.back();
                        return check_result{drop >= 10.0, "loss " + sci(r.history.front()) + " -> " +
                                                              sci(r.history.back())};
                      }});
  return checks;
}

}  // namespace

int run_selftest(const selftest_options& opt) {
  const auto checks = build_checks(opt);
  int failures = 0;
  std::size_t width = 0;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : checks) {
    check_result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += r.passed ? 0 : 1;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << c.name << std::string(width - c.name.size() + 2, ' ')
              << r.detail << "\n";
  }
  const real secs = std::chrono::duration<real>(std::chrono::steady_clock::now() - start).count();
  std::cout << (checks.size() - static_cast<std::size_t>(failures)) << "/" << checks.size() << " checks passed in "
            << sci(secs) << " s" << (opt.quick ? " (quick)" : "") << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace colp::cli
