#include "colp/dataset.hpp"
#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace colp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("colp_test_dataset_" + name);
  fs::remove_all(p);
  return p;
}

dataset_config small_config(group_kind kind) {
  dataset_config c = dataset_config::defaults(kind);
  c.num_trajectories = 4;
  c.points_per_trajectory = 6;
  c.substeps = 20;
  c.seed = 99;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("default pair counts") {
  CHECK(dataset_config::defaults(group_kind::so3).num_pairs() == 2000);
  CHECK(dataset_config::defaults(group_kind::se3).num_pairs() == 4000);
  dataset_config c = dataset_config::defaults(group_kind::so3);
  c.points_per_trajectory = 2;
  CHECK(c.num_pairs() == c.num_trajectories);
}

TEST_CASE("config validation") {
  dataset_config c;
  c.num_trajectories = 0;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.points_per_trajectory = 1;
  CHECK_THROWS_AS(c.validate(), error);
  c = {};
  c.ic_box = 0.0;
  CHECK_THROWS_AS(c.validate(), error);
}

TEST_CASE("initial sampling") {
  dataset_config c = dataset_config::defaults(group_kind::se3);
  rng a(5), b(5);
  for (int t = 0; t < 100; ++t) {
    const auto s = sample_initial(c, a);
    CHECK(s.mu.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(s.mu == sample_initial(c, b).mu);
  }
  c = dataset_config::defaults(group_kind::so3);
  c.num_particles = 1;
  rng gen(6);
  vec3 mean = vec3::Zero();
  const int n = 100000;
  for (int t = 0; t < n; ++t) mean += sample_initial(c, gen).mu;
  mean /= n;
  CHECK(mean.cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("generated pairs follow the flow") {
  const auto c = small_config(group_kind::se3);
  const pair_set p = generate(c);
  CHECK(p.rows() == c.num_pairs());
  CHECK(p.begin.cols() == 18);
  const auto model = c.make_model();
  const auto integ = c.make_integrator();
  for (Eigen::Index r = 0; r < p.rows(); r += 2) {
    const vec b = p.begin.row(r).transpose();
    const vec e = p.end.row(r).transpose();
    CHECK((advance(model, b, integ) - e).cwiseAbs().maxCoeff() <= 1e-13);
    const auto cb = casimirs(phase_state(c.group, 3, b));
    const auto ce = casimirs(phase_state(c.group, 3, e));
    for (std::size_t j = 0; j < cb.values.size(); ++j) CHECK(std::abs(cb.values[j] - ce.values[j]) <= 1e-12);
  }
  // consecutive rows overlap within a trajectory
  CHECK(p.end.row(0) == p.begin.row(1));
  CHECK(p.provenance[5] == std::make_pair(1, 0));
}

TEST_CASE("generation is deterministic") {
  const auto c = small_config(group_kind::so3);
  const auto a = generate(c);
  const auto b = generate(c);
  CHECK(a.begin == b.begin);
  CHECK(a.end == b.end);
  auto c2 = c;
  c2.seed = 100;
  CHECK(generate(c2).begin != a.begin);
}

TEST_CASE("save and load round-trip bit-exactly") {
  const auto dir = scratch("roundtrip");
  const auto p = generate(small_config(group_kind::se3));
  save(p, dir);
  const auto q = load(dir);
  CHECK(q.begin == p.begin);
  CHECK(q.end == p.end);
  CHECK(q.provenance == p.provenance);
  CHECK(q.config.seed == p.config.seed);
  CHECK(q.config.topo == p.config.topo);
  CHECK(load_manifest(dir).num_pairs() == p.rows());
  const std::string header = slurp(dir / "pairs.csv").substr(0, 20);
  CHECK(header.rfind("traj,step,b_0,b_1", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("load rejects malformed datasets") {
  const auto dir = scratch("bad");
  save(generate(small_config(group_kind::so3)), dir);
  const std::string manifest = slurp(dir / "manifest.json");
  const std::string pairs = slurp(dir / "pairs.csv");

  SUBCASE("unknown group") {
    std::string m = manifest;
    m.replace(m.find("\"so3\""), 5, "\"se2\"");
    spit(dir / "manifest.json", m);
    CHECK_THROWS_AS(load(dir), error);
  }
  SUBCASE("schema version") {
    std::string m = manifest;
    m.replace(m.find("\"schema_version\": 1"), 19, "\"schema_version\": 2");
    spit(dir / "manifest.json", m);
    CHECK_THROWS_WITH_AS(load(dir), doctest::Contains("schema_version"), error);
  }
  SUBCASE("truncated csv") {
    spit(dir / "pairs.csv", pairs.substr(0, pairs.rfind('\n', pairs.size() - 2) + 1));
    CHECK_THROWS_WITH_AS(load(dir), doctest::Contains("rows"), error);
  }
  SUBCASE("short row") {
    std::string s = pairs;
    const auto second_line = s.find('\n') + 1;
    s.erase(s.find(',', s.find(',', second_line) + 1), s.find('\n', second_line) - s.find(',', s.find(',', second_line) + 1));
    spit(dir / "pairs.csv", s);
    CHECK_THROWS_WITH_AS(load(dir), doctest::Contains("fields"), error);
  }
  SUBCASE("missing directory") { CHECK_THROWS_AS(load(dir / "nope"), error); }
  fs::remove_all(dir);
}
