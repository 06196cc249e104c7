#pragma once

// Built-in problem sets on the unit square, three members each.

#include <vector>

#include "ehdg/ensemble_solver.hpp"
#include "ehdg/types.hpp"

namespace ehdg {

/// Diffusion dominated, smooth exact solution u_j = sin(t) sin(x) sin(y) / j,
/// c = {0.26959, 0.26633, 0.30525}, beta_j = b_j (y, x). T = 1.
ProblemSpec example1();

/// Convection dominated, exact solutions with an arctan interior layer of
/// width ~ c_j^{-1/2}; c = {1e4, 2e4, 3e4}, constant beta. T = 0.1.
ProblemSpec example2();

/// Convection dominated with boundary layers, constant sources, no exact
/// solution; c = {60, 120, 180}. T = 0.1.
ProblemSpec example3();

/// Throws std::invalid_argument unless id is 1, 2 or 3.
ProblemSpec example(int id);

/// Member with constant coefficients and source, g = 0, u0 = 0.
struct ConstantMember {
  double c = 1.0;
  Vec2 beta = Vec2::Zero();
  double f = 0.0;
};

ProblemSpec constant_problem(const std::string& name, const std::vector<ConstantMember>& members,
                             double final_time);

/// Member data manufactured from an exact solution with constant c:
/// q = -grad u / c, f = du/dt + div q + beta.grad u, g = u on the boundary,
/// u0 = u(., 0). The caller supplies u, du/dt, grad u and the Laplacian.
struct ExactSolution {
  SpaceTimeScalar u;
  SpaceTimeScalar u_t;
  SpaceTimeVector grad;
  SpaceTimeScalar laplacian;
};

Member manufactured_member(double c, SpaceTimeVector beta, const ExactSolution& exact);

}  // namespace ehdg
