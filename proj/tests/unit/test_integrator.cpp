#include "colp/integrator.hpp"
#include "colp/oracles.hpp"
#include "support.hpp"

#include <cmath>

using namespace colp;
using colp::test::random_state;

TEST_CASE("config validation") {
  integrator_config c;
  CHECK_NOTHROW(c.validate());
  c.substeps = 0;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.dt_output = 0.0;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.fp_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), error);
}

TEST_CASE("origin is a fixed point") {
  const control_model m(group_spec::se3(), topology::democracy(), 3, 0.5);
  const auto z = phase_state::zero(group_spec::se3(), 3);
  CHECK(midpoint_substep(m, z, 1e-3).mu.isZero());
  const auto traj = integrate(m, z, integrator_config{}, 5);
  for (const auto& s : traj.states) CHECK(s.isZero());
  const auto d = diagnostics(m, traj);
  CHECK(d.max_energy_deviation == 0.0);
  for (real v : d.max_casimir_deviation) CHECK(v == 0.0);
}

TEST_CASE("one substep preserves the quadratic Casimir") {
  const auto m = single_particle_so3();
  rng gen(1);
  for (int t = 0; t < 50; ++t) {
    const auto s = random_state(gen, group_spec::so3(), 1);
    const auto next = midpoint_substep(m, s, 1e-3);
    CHECK(std::abs(casimirs(next).value(0) - casimirs(s).value(0)) <= 1e-13);
  }
}

TEST_CASE("midpoint solution satisfies the implicit equation") {
  const control_model m(group_spec::se3(), topology::dictatorship(), 3, 0.5);
  rng gen(2);
  const auto s = random_state(gen, m.group(), 3);
  const real h = 1e-3;
  const vec next = midpoint_substep(m, s.mu, h);
  vec field;
  m.vector_field(vec(0.5 * (s.mu + next)), field);
  CHECK((next - s.mu - h * field).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("non-convergence is reported with its residual") {
  const control_model m(group_spec::so3(), topology::democracy(), 3, 0.5);
  const phase_state s(group_spec::so3(), 3, vec::Constant(9, 50.0));
  integrator_config c;
  c.max_iters = 3;
  try {
    midpoint_substep(m, s.mu, 0.5, c);
    FAIL("expected convergence_error");
  } catch (const convergence_error& e) {
    CHECK(e.residual() > c.fp_tol);
  }
}

TEST_CASE("ground-truth trajectories conserve Casimirs and energy") {
  rng gen(3);
  for (group_kind kind : {group_kind::so3, group_kind::se3})
    for (auto topo : {topology::dictatorship(), topology::democracy()}) {
      const control_model m(group_spec::of(kind), topo, 3, 0.5);
      const auto traj = integrate(m, random_state(gen, m.group(), 3), integrator_config{}, 51);
      CHECK(traj.size() == 51);
      const auto d = diagnostics(m, traj);
      CHECK(d.worst_relative_casimir_deviation() <= 1e-12);
      CHECK(d.max_relative_energy_deviation <= 1e-12);
      CHECK(d.casimirs.front().size() == static_cast<std::size_t>(3 * m.group().casimirs_per_particle()));
      CHECK(d.energy.size() == 51);
    }
}

TEST_CASE("second-order convergence") {
  const auto m = single_particle_so3();
  const vec mu0 = vec3(0.6, -0.4, 0.8);
  auto run = [&](int sub) {
    integrator_config c;
    c.dt_output = 1.0;
    c.substeps = sub;
    return advance(m, mu0, c);
  };
  const vec reference = run(64 * 64);
  const real e1 = (run(16) - reference).norm();
  const real e2 = (run(32) - reference).norm();
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.125));
  const real order = oracles::order_estimate(e1, e2);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);
}

TEST_CASE("forward then backward returns to the start") {
  const control_model m(group_spec::se3(), topology::democracy(), 3, 0.5);
  rng gen(4);
  const auto s = random_state(gen, m.group(), 3);
  vec x = s.mu;
  const real h = 1e-3;
  for (int i = 0; i < 100; ++i) x = midpoint_substep(m, x, h);
  for (int i = 0; i < 100; ++i) x = midpoint_substep(m, x, -h);
  CHECK((x - s.mu).lpNorm<Eigen::Infinity>() <= 1e-11);
}

TEST_CASE("single-particle SO(3) reduction") {
  const auto m = single_particle_so3();
  integrator_config c;
  c.dt_output = 0.01;
  c.substeps = 10;
  const auto traj = integrate(m, phase_state(group_spec::so3(), 1, vec3(0.5, 0.3, -0.7)), c, 1001);
  CHECK(oracles::single_particle_reduction_residual(traj) <= 1e-4);
}

TEST_CASE("single-particle SE(3) drift variant keeps mu_3 at zero") {
  const auto m = single_particle_se3_mu6_drift();
  vector<real, 6> mu;
  mu << 0.4, -0.6, 0.0, 0.9, 0.2, -0.5;
  const auto traj = integrate(m, phase_state(group_spec::se3(), 1, mu), integrator_config{}, 201);
  real worst = 0.0;
  for (const auto& s : traj.states) worst = std::max(worst, std::abs(s(2)));
  CHECK(worst <= 1e-13);
}

TEST_CASE("shape mismatches are rejected") {
  const control_model m(group_spec::so3(), topology::democracy(), 3, 0.5);
  CHECK_THROWS_AS(integrate(m, phase_state::zero(group_spec::so3(), 2), integrator_config{}, 3), dimension_error);
  CHECK_THROWS_AS(integrate(m, phase_state::zero(group_spec::so3(), 3), integrator_config{}, 1), error);
}
