#pragma once

#include "colp/control.hpp"
#include "colp/integrator.hpp"
#include "colp/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace colp {

struct dataset_config {
  group_spec group = group_spec::so3();
  topology_kind topo = topology_kind::democracy;
  int num_particles = 3;
  real chi = 0.5;
  real dt = 0.1;
  int substeps = 100;
  int num_trajectories = 40;
  int points_per_trajectory = 51;
  std::uint64_t seed = 0;
  real ic_box = 1.0;

  /// Defaults used for the reference experiments: 40 trajectories on SO(3), 80 on SE(3).
  static dataset_config defaults(group_kind kind);

  void validate() const;
  Eigen::Index state_size() const { return static_cast<Eigen::Index>(group.dim) * num_particles; }
  int num_pairs() const { return num_trajectories * (points_per_trajectory - 1); }

  control_model make_model() const;
  integrator_config make_integrator() const;
};

/// Begin/end pairs one output interval apart.
struct pair_set {
  dataset_config config;
  sample_matrix begin;
  sample_matrix end;
  /// (trajectory, step) for each row
  std::vector<std::pair<int, int>> provenance;

  Eigen::Index rows() const { return begin.rows(); }
};

phase_state sample_initial(const dataset_config& config, rng& gen);

/// Pure function of the config. Trajectories are integrated in parallel and
/// assembled in trajectory order.
pair_set generate(const dataset_config& config);

inline constexpr int dataset_schema_version = 1;

/// Writes manifest.json and pairs.csv into `dir` (created if missing).
void save(const pair_set& pairs, const std::filesystem::path& dir);
pair_set load(const std::filesystem::path& dir);
/// Reads and validates manifest.json only.
dataset_config load_manifest(const std::filesystem::path& dir);

}  // namespace colp
