#include "colp/lie.hpp"
#include "colp/oracles.hpp"
#include "colp/poisson_maps.hpp"
#include "support.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>

using namespace colp;
using colp::test::max_abs_diff;
using colp::test::random_state;

TEST_CASE("descriptor kinds and schedules") {
  CHECK(map_descriptor::make(group_spec::so3(), 0, 2).kind == map_kind::rotation);
  CHECK(map_descriptor::make(group_spec::se3(), 0, 2).kind == map_kind::rotation);
  CHECK(map_descriptor::make(group_spec::se3(), 0, 3).kind == map_kind::shear);
  CHECK_THROWS_AS(map_descriptor::make(group_spec::so3(), 0, 3), error);
  CHECK_THROWS_AS(validate(map_descriptor{0, 1, map_kind::shear}, group_spec::se3(), 1), error);
  CHECK_THROWS_AS(validate(map_descriptor{2, 0, map_kind::rotation}, group_spec::so3(), 2), error);

  const auto s = map_schedule::standard(group_spec::se3(), 3, 0.1, 2);
  CHECK(s.size() == 36);
  CHECK(s.maps[7] == map_descriptor{1, 1, map_kind::rotation});
  CHECK(s.maps[18] == s.maps[0]);
  CHECK(map_schedule::standard(group_spec::so3(), 3, 0.1).size() == 9);
  CHECK_THROWS_AS(map_schedule::standard(group_spec::so3(), 3, 0.1, 0), error);
}

TEST_CASE("rotation example") {
  // quarter turn about e_3 sends e_1 to -e_2
  const auto d = map_descriptor::make(group_spec::so3(), 0, 2);
  const auto out = apply_map(phase_state(group_spec::so3(), 1, vec3(1, 0, 0)), d, std::numbers::pi / 2, 1.0);
  CHECK(max_abs_diff(out.mu, vec3(0, -1, 0)) <= 1e-15);
  CHECK(apply_map(phase_state(group_spec::so3(), 1, vec3(0.3, 0.2, 0.1)), d, 0.0, 0.1).mu == vec3(0.3, 0.2, 0.1));
}

TEST_CASE("shear example") {
  vector<real, 6> mu;
  mu << 0, 0, 0, 1, 2, 3;
  const auto d = map_descriptor::make(group_spec::se3(), 0, 3);
  const auto out = apply_map(phase_state(group_spec::se3(), 1, mu), d, 2.0, 0.5);
  vector<real, 6> expected;
  expected << 0, 3, -2, 1, 2, 3;
  CHECK(out.mu == expected);
}

TEST_CASE("map matrices are orthogonal or unimodular and act on one particle") {
  rng gen(1);
  for (auto group : {group_spec::so3(), group_spec::se3()})
    for (int i = 0; i < group.dim; ++i) {
      const auto d = map_descriptor::make(group, 1, i);
      const mat a = map_matrix(group, d, 0.7, 0.1);
      CHECK(std::abs(a.determinant() - 1.0) <= 1e-14);
      if (d.kind == map_kind::rotation) CHECK(max_abs_diff(a * a.transpose(), mat::Identity(group.dim, group.dim)) <= 1e-15);
      const auto s = random_state(gen, group, 3);
      const auto out = apply_map(s, d, 0.7, 0.1);
      CHECK(out.particle(0) == s.particle(0));
      CHECK(out.particle(2) == s.particle(2));
      CHECK(max_abs_diff(out.particle(1), a * s.particle(1)) <= 1e-15);
    }
}

TEST_CASE("derivative in w matches finite differences") {
  rng gen(2);
  for (auto group : {group_spec::so3(), group_spec::se3()})
    for (int i = 0; i < group.dim; ++i) {
      const auto d = map_descriptor::make(group, 0, i);
      const auto s = random_state(gen, group, 2);
      const real w = gen.uniform(-2, 2);
      const real h = 1e-6;
      const vec fd = (apply_map(s, d, w + h, 0.1).mu - apply_map(s, d, w - h, 0.1).mu) / (2 * h);
      CHECK(max_abs_diff(d_apply_d_w(s, d, w, 0.1), fd) <= 1e-7);
      const mat fdm = (map_matrix(group, d, w + h, 0.1) - map_matrix(group, d, w - h, 0.1)) / (2 * h);
      CHECK(max_abs_diff(map_matrix_derivative(group, d, w, 0.1), fdm) <= 1e-7);
    }
}

TEST_CASE("maps are linear and form a one-parameter group") {
  rng gen(3);
  for (auto group : {group_spec::so3(), group_spec::se3()})
    for (int i = 0; i < group.dim; ++i) {
      const auto d = map_descriptor::make(group, 0, i);
      const auto x = random_state(gen, group, 1);
      const auto y = random_state(gen, group, 1);
      const phase_state combo(group, 1, vec(2.0 * x.mu - 0.5 * y.mu));
      const vec lhs = apply_map(combo, d, 1.3, 0.1).mu;
      const vec rhs = 2.0 * apply_map(x, d, 1.3, 0.1).mu - 0.5 * apply_map(y, d, 1.3, 0.1).mu;
      CHECK(max_abs_diff(lhs, rhs) <= 1e-15);
      const vec composed = apply_map(apply_map(x, d, 0.4, 0.1), d, 0.9, 0.1).mu;
      CHECK(max_abs_diff(composed, apply_map(x, d, 1.3, 0.1).mu) <= 1e-15);
    }
}

TEST_CASE("maps are exact flows of the linear test Hamiltonians") {
  rng gen(4);
  for (group_kind kind : {group_kind::so3, group_kind::se3}) {
    const auto group = group_spec::of(kind);
    for (int i = 0; i < group.dim; ++i) {
      const auto d = map_descriptor::make(group, 1, i);
      const auto s = random_state(gen, group, 2);
      const real w = gen.uniform(-3, 3);
      const vec rk = oracles::rk4_flow(oracles::test_hamiltonian_field(kind, 1, i, w), s.mu, 0.1, 1000);
      CHECK(max_abs_diff(apply_map(s, d, w, 0.1).mu, rk) <= 1e-12);
    }
  }
}

TEST_CASE("oracle field is the Lie-Poisson field of the linear Hamiltonian") {
  rng gen(5);
  for (group_kind kind : {group_kind::so3, group_kind::se3}) {
    const auto group = group_spec::of(kind);
    for (int i = 0; i < group.dim; ++i) {
      const auto s = random_state(gen, group, 2);
      vec grad = vec::Zero(s.size());
      grad(group.dim + i) = 0.8;
      const vec lp = poisson_tensor(s) * grad;
      // the maps use the field without the 1/sqrt(2) factor
      CHECK(max_abs_diff(std::sqrt(2.0) * lp, oracles::test_hamiltonian_field(kind, 1, i, 0.8)(s.mu)) <= 1e-15);
    }
  }
}

TEST_CASE("repeated maps preserve every Casimir") {
  rng gen(6);
  for (auto group : {group_spec::so3(), group_spec::se3()}) {
    phase_state s = random_state(gen, group, 2);
    const auto before = casimirs(s);
    const auto schedule = map_schedule::standard(group, 2, 0.1);
    for (int t = 0; t < 10000; ++t) {
      const auto& d = schedule.maps[static_cast<std::size_t>(t) % schedule.size()];
      s = apply_map(s, d, gen.uniform(-1, 1), 0.1);
    }
    const auto after = casimirs(s);
    for (std::size_t j = 0; j < before.values.size(); ++j)
      CHECK(std::abs(after.values[j] - before.values[j]) <= 1e-11 * std::max(1.0, std::abs(before.values[j])));
  }
}
