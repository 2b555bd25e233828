#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>

namespace colp {

template <class T, int Rows = Eigen::Dynamic, int Cols = Eigen::Dynamic>
using matrix = Eigen::Matrix<T, Rows, Cols>;

template <class T, int Rows = Eigen::Dynamic>
using vector = matrix<T, Rows, 1>;

using real = double;
using vec = vector<real>;
using mat = matrix<real>;
using vec3 = vector<real, 3>;
using mat3 = matrix<real, 3, 3>;

/// Row-major sample matrix: one phase-space state per row.
using sample_matrix = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Shape or group mismatch between two inputs.
class dimension_error : public error {
public:
  using error::error;
};

enum class group_kind { so3, se3 };

/// Algebra metadata for SO(3) and SE(3).
///
/// Indices are 0-based: `drift` is the zero-based index of the drifting
/// component and the first `controls` components are actuated.
struct group_spec {
  group_kind kind = group_kind::so3;
  int dim = 3;
  int drift = 1;
  int controls = 1;

  static constexpr group_spec so3() { return {group_kind::so3, 3, 1, 1}; }
  static constexpr group_spec se3() { return {group_kind::se3, 6, 3, 2}; }

  static group_spec of(group_kind kind) { return kind == group_kind::so3 ? so3() : se3(); }

  /// Number of Casimirs per particle.
  int casimirs_per_particle() const { return kind == group_kind::so3 ? 1 : 2; }

  friend bool operator==(const group_spec&, const group_spec&) = default;
};

std::string_view to_string(group_kind kind);
group_kind parse_group(std::string_view name);

/// Stacked momenta of N particles, particle-major.
struct phase_state {
  group_spec group;
  int num_particles = 0;
  vec mu;

  phase_state() = default;
  phase_state(group_spec g, int n, vec values);

  static phase_state zero(group_spec g, int n) { return {g, n, vec::Zero(static_cast<Eigen::Index>(g.dim) * n)}; }

  Eigen::Index size() const { return mu.size(); }

  auto particle(int k) { return mu.segment(static_cast<Eigen::Index>(k) * group.dim, group.dim); }
  auto particle(int k) const { return mu.segment(static_cast<Eigen::Index>(k) * group.dim, group.dim); }
};

}  // namespace colp
