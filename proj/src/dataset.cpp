#include "colp/dataset.hpp"

#include "colp/parallel.hpp"
#include "colp/io.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace colp {

using json = nlohmann::json;

dataset_config dataset_config::defaults(group_kind kind) {
  dataset_config c;
  c.group = group_spec::of(kind);
  c.num_trajectories = kind == group_kind::so3 ? 40 : 80;
  return c;
}

void dataset_config::validate() const {
  if (num_particles < 1) throw error("dataset: num_particles must be at least 1");
  if (num_trajectories < 1) throw error("dataset: num_trajectories must be at least 1");
  if (points_per_trajectory < 2) throw error("dataset: points_per_trajectory must be at least 2");
  if (!(ic_box > 0.0)) throw error("dataset: ic_box must be positive");
  if (!(dt > 0.0)) throw error("dataset: dt must be positive");
  if (chi < 0.0) throw error("dataset: chi must be non-negative");
  if (substeps < 1) throw error("dataset: substeps must be at least 1");
}

control_model dataset_config::make_model() const {
  return {group, topo == topology_kind::dictatorship ? topology::dictatorship() : topology::democracy(), num_particles,
          chi};
}

integrator_config dataset_config::make_integrator() const {
  integrator_config c;
  c.dt_output = dt;
  c.substeps = substeps;
  return c;
}

phase_state sample_initial(const dataset_config& config, rng& gen) {
  vec mu(config.state_size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = gen.uniform(-config.ic_box, config.ic_box);
  return {config.group, config.num_particles, std::move(mu)};
}

pair_set generate(const dataset_config& config) {
  config.validate();
  if (config.topo == topology_kind::custom) throw error("generate: custom topologies are not supported for datasets");
  const control_model model = config.make_model();
  const integrator_config integ = config.make_integrator();

  rng gen(config.seed);
  std::vector<phase_state> initials;
  initials.reserve(static_cast<std::size_t>(config.num_trajectories));
  for (int t = 0; t < config.num_trajectories; ++t) initials.push_back(sample_initial(config, gen));

  std::vector<trajectory> trajs(initials.size());
  parallel_for(initials.size(), [&](std::size_t t) {
    try {
      trajs[t] = integrate(model, initials[t], integ, config.points_per_trajectory);
    } catch (const error& e) {
      throw error("generate: trajectory " + std::to_string(t) + ": " + e.what());
    }
  });

  pair_set out;
  out.config = config;
  const int steps = config.points_per_trajectory - 1;
  const Eigen::Index d = config.state_size();
  out.begin.resize(config.num_pairs(), d);
  out.end.resize(config.num_pairs(), d);
  out.provenance.reserve(static_cast<std::size_t>(config.num_pairs()));
  Eigen::Index row = 0;
  for (int t = 0; t < config.num_trajectories; ++t)
    for (int s = 0; s < steps; ++s, ++row) {
      out.begin.row(row) = trajs[static_cast<std::size_t>(t)].states[static_cast<std::size_t>(s)].transpose();
      out.end.row(row) = trajs[static_cast<std::size_t>(t)].states[static_cast<std::size_t>(s + 1)].transpose();
      out.provenance.emplace_back(t, s);
    }
  return out;
}

namespace {

constexpr const char* pairs_file = "pairs.csv";

json manifest_of(const dataset_config& c) {
  json m;
  m["schema_version"] = dataset_schema_version;
  m["group"] = std::string(to_string(c.group.kind));
  m["topology"] = std::string(to_string(c.topo));
  m["num_particles"] = c.num_particles;
  m["algebra_dim"] = c.group.dim;
  m["chi"] = c.chi;
  m["dt"] = c.dt;
  m["substeps"] = c.substeps;
  m["num_trajectories"] = c.num_trajectories;
  m["points_per_trajectory"] = c.points_per_trajectory;
  m["seed"] = c.seed;
  m["rng_name"] = rng::name;
  m["ic_box"] = c.ic_box;
  m["pairs_file"] = pairs_file;
  return m;
}

template <class T>
T require(const json& m, const char* key) {
  if (!m.contains(key)) throw error(std::string("dataset manifest: missing key '") + key + "'");
  try {
    return m.at(key).get<T>();
  } catch (const json::exception& e) {
    throw error(std::string("dataset manifest: bad value for '") + key + "': " + e.what());
  }
}

real parse_real(const std::string& field, std::size_t line) {
  errno = 0;
  char* endp = nullptr;
  const double v = std::strtod(field.c_str(), &endp);
  if (endp == field.c_str() || *endp != '\0' || errno == ERANGE)
    throw error("pairs.csv line " + std::to_string(line) + ": cannot parse number '" + field + "'");
  return v;
}

}  // namespace

void save(const pair_set& pairs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto& c = pairs.config;
  const Eigen::Index d = c.state_size();
  if (pairs.begin.cols() != d || pairs.end.cols() != d || pairs.begin.rows() != pairs.end.rows())
    throw dimension_error("save: begin/end arrays do not match the config");

  write_file_atomic(dir / "manifest.json", manifest_of(c).dump(2) + "\n");

  std::string body;
  body.reserve(static_cast<std::size_t>(pairs.rows() * d * 2 * 25));
  body += "traj,step";
  for (Eigen::Index i = 0; i < d; ++i) body += ",b_" + std::to_string(i);
  for (Eigen::Index i = 0; i < d; ++i) body += ",e_" + std::to_string(i);
  body += '\n';
  for (Eigen::Index r = 0; r < pairs.rows(); ++r) {
    const auto& [t, s] = pairs.provenance[static_cast<std::size_t>(r)];
    body += std::to_string(t);
    body += ',';
    body += std::to_string(s);
    for (Eigen::Index i = 0; i < d; ++i) (body += ',') += format_real(pairs.begin(r, i));
    for (Eigen::Index i = 0; i < d; ++i) (body += ',') += format_real(pairs.end(r, i));
    body += '\n';
  }
  write_file_atomic(dir / pairs_file, body);
}

namespace {

struct manifest_contents {
  dataset_config config;
  std::string pairs_file;
};

manifest_contents read_manifest(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream mf(manifest_path);
  if (!mf) throw error("dataset: cannot open " + manifest_path.string());
  json m;
  try {
    m = json::parse(mf);
  } catch (const json::exception& e) {
    throw error("dataset: malformed manifest.json: " + std::string(e.what()));
  }
  const int version = require<int>(m, "schema_version");
  if (version != dataset_schema_version)
    throw error("dataset: unsupported schema_version " + std::to_string(version) + " (expected " +
                std::to_string(dataset_schema_version) + ")");

  dataset_config c;
  c.group = group_spec::of(parse_group(require<std::string>(m, "group")));
  c.topo = parse_topology(require<std::string>(m, "topology"));
  c.num_particles = require<int>(m, "num_particles");
  if (require<int>(m, "algebra_dim") != c.group.dim) throw error("dataset: algebra_dim does not match group");
  c.chi = require<real>(m, "chi");
  c.dt = require<real>(m, "dt");
  c.substeps = m.value("substeps", 100);
  c.num_trajectories = require<int>(m, "num_trajectories");
  c.points_per_trajectory = require<int>(m, "points_per_trajectory");
  c.seed = require<std::uint64_t>(m, "seed");
  c.ic_box = require<real>(m, "ic_box");
  const auto rng_name = require<std::string>(m, "rng_name");
  if (rng_name != rng::name) throw error("dataset: unknown rng_name '" + rng_name + "'");
  c.validate();
  return {c, require<std::string>(m, "pairs_file")};
}

}  // namespace

dataset_config load_manifest(const std::filesystem::path& dir) { return read_manifest(dir).config; }

pair_set load(const std::filesystem::path& dir) {
  const auto [c, file] = read_manifest(dir);
  const auto csv_path = dir / file;
  std::ifstream in(csv_path);
  if (!in) throw error("dataset: cannot open " + csv_path.string());

  const Eigen::Index d = c.state_size();
  const Eigen::Index rows = c.num_pairs();
  pair_set out;
  out.config = c;
  out.begin.resize(rows, d);
  out.end.resize(rows, d);
  out.provenance.reserve(static_cast<std::size_t>(rows));

  std::string line;
  if (!std::getline(in, line)) throw error("dataset: pairs.csv is empty");
  std::string expected_header = "traj,step";
  for (Eigen::Index i = 0; i < d; ++i) expected_header += ",b_" + std::to_string(i);
  for (Eigen::Index i = 0; i < d; ++i) expected_header += ",e_" + std::to_string(i);
  if (line != expected_header) throw error("dataset: pairs.csv header does not match algebra_dim * num_particles");

  Eigen::Index row = 0;
  std::size_t line_no = 1;
  std::string field;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (row >= rows)
      throw error("dataset: pairs.csv has more rows than the manifest's " + std::to_string(rows));
    std::istringstream ls(line);
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (static_cast<Eigen::Index>(fields.size()) != 2 + 2 * d)
      throw error("dataset: pairs.csv line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                  " fields, expected " + std::to_string(2 + 2 * d));
    out.provenance.emplace_back(std::stoi(fields[0]), std::stoi(fields[1]));
    for (Eigen::Index i = 0; i < d; ++i) {
      out.begin(row, i) = parse_real(fields[static_cast<std::size_t>(2 + i)], line_no);
      out.end(row, i) = parse_real(fields[static_cast<std::size_t>(2 + d + i)], line_no);
    }
    ++row;
  }
  if (row != rows)
    throw error("dataset: pairs.csv has " + std::to_string(row) + " rows, manifest implies " + std::to_string(rows));
  return out;
}

}  // namespace colp
