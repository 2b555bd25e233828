#pragma once

#include "colp/rng.hpp"
#include "colp/types.hpp"

#include <doctest.h>

#include <algorithm>

namespace colp::test {

inline vec random_vec(rng& gen, Eigen::Index n, real box = 1.0) {
  vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gen.uniform(-box, box);
  return v;
}

inline phase_state random_state(rng& gen, const group_spec& group, int num_particles, real box = 1.0) {
  return {group, num_particles, random_vec(gen, static_cast<Eigen::Index>(group.dim) * num_particles, box)};
}

template <class A, class B>
real max_abs_diff(const A& a, const B& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline real relative_error(const vec& a, const vec& b) {
  return (a - b).norm() / std::max(1e-300, std::max(a.norm(), b.norm()));
}

}  // namespace colp::test
