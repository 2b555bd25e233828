#include "colp/poisson_maps.hpp"

namespace colp {

map_descriptor map_descriptor::make(const group_spec& group, int particle, int component) {
  if (component < 0 || component >= group.dim) throw error("map_descriptor: component out of range");
  const bool shear = group.kind == group_kind::se3 && component >= 3;
  return {particle, component, shear ? map_kind::shear : map_kind::rotation};
}

map_schedule map_schedule::standard(const group_spec& group, int num_particles, real delta_t, int passes) {
  if (passes < 1) throw error("map_schedule: passes must be at least 1");
  if (num_particles < 1) throw error("map_schedule: need at least one particle");
  map_schedule s;
  s.delta_t = delta_t;
  for (int p = 0; p < passes; ++p)
    for (int k = 0; k < num_particles; ++k)
      for (int i = 0; i < group.dim; ++i) s.maps.push_back(map_descriptor::make(group, k, i));
  return s;
}

void validate(const map_descriptor& desc, const group_spec& group, int num_particles) {
  if (desc.particle < 0 || desc.particle >= num_particles) throw error("map_descriptor: particle out of range");
  if (desc.component < 0 || desc.component >= group.dim) throw error("map_descriptor: component out of range");
  const map_kind expected = map_descriptor::make(group, desc.particle, desc.component).kind;
  if (desc.kind != expected) throw error("map_descriptor: map kind does not match group and component");
}

mat map_matrix(const group_spec& group, const map_descriptor& desc, real w, real t_star) {
  validate(desc, group, desc.particle + 1);
  const real theta = w * t_star;
  if (group.kind == group_kind::so3) return rotation_block(desc.component, theta);
  mat a = mat::Identity(6, 6);
  if (desc.kind == map_kind::rotation) {
    const mat3 r = rotation_block(desc.component, theta);
    a.topLeftCorner<3, 3>() = r;
    a.bottomRightCorner<3, 3>() = r;
  } else {
    a += theta * shear_generator<real>(desc.component - 3);
  }
  return a;
}

mat map_matrix_derivative(const group_spec& group, const map_descriptor& desc, real w, real t_star) {
  validate(desc, group, desc.particle + 1);
  const real theta = w * t_star;
  if (group.kind == group_kind::so3) return t_star * rotation_block_derivative(desc.component, theta);
  mat a = mat::Zero(6, 6);
  if (desc.kind == map_kind::rotation) {
    const mat3 r = t_star * rotation_block_derivative(desc.component, theta);
    a.topLeftCorner<3, 3>() = r;
    a.bottomRightCorner<3, 3>() = r;
  } else {
    a = t_star * shear_generator<real>(desc.component - 3);
  }
  return a;
}

phase_state apply_map(const phase_state& state, const map_descriptor& desc, real w, real t_star) {
  validate(desc, state.group, state.num_particles);
  phase_state out = state;
  detail::apply_block(state.group, desc, w * t_star, out.mu.data() + static_cast<Eigen::Index>(desc.particle) * state.group.dim);
  return out;
}

vec d_apply_d_w(const phase_state& state, const map_descriptor& desc, real w, real t_star) {
  validate(desc, state.group, state.num_particles);
  vec out = vec::Zero(state.size());
  const int n = state.group.dim;
  const Eigen::Index off = static_cast<Eigen::Index>(desc.particle) * n;
  out.segment(off, n) = map_matrix_derivative(state.group, desc, w, t_star) * state.particle(desc.particle);
  return out;
}

}  // namespace colp
