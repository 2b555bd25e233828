#pragma once

#include "colp/control.hpp"
#include "colp/integrator.hpp"
#include "colp/poisson_maps.hpp"

#include <functional>

namespace colp::oracles {

// Reference implementations used only for verification. None of them call
// into the code they are meant to check.

struct fd_config {
  real step = 1e-6;
};

using scalar_function = std::function<real(const vec&)>;
using vector_field = std::function<vec(const vec&)>;

/// Central differences per coordinate.
vec fd_gradient(const scalar_function& f, const vec& x, const fd_config& config = {});

/// Classical fourth-order Runge-Kutta over [0, t] with `steps` equal steps.
vec rk4_flow(const vector_field& field, const vec& x0, real t, int steps);

/// log2(e_h / e_{h/2}).
real order_estimate(real error_h, real error_half);

/// Max over interior points of |second difference of mu_1 - mu_1 (mu_2 - 1) / 2|
/// along a single-particle SO(3) trajectory.
real single_particle_reduction_residual(const trajectory& traj);

/// Hand-expanded polynomial Hamiltonians for dictatorship and democracy.
real explicit_hamiltonian(group_kind group, topology_kind topo, int num_particles, real chi, const vec& mu);

/// Gauss-Jordan inverse with partial pivoting.
mat brute_force_inverse(const mat& a);

/// Lie-Poisson field of the test Hamiltonian w * mu_{k,i}, written with cross
/// products: rotations give x' = w x cross e_a, shears give Pi' = w p cross e_a.
vector_field test_hamiltonian_field(group_kind group, int particle, int component, real w);

}  // namespace colp::oracles
