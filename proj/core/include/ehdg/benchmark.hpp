#pragma once

#include "ehdg/ensemble_solver.hpp"

namespace ehdg {

struct BenchmarkReport {
  int members = 0;
  int steps = 0;
  double ensemble_seconds = 0.0;  // one run with all members
  double separate_seconds = 0.0;  // sum of one-member runs
  int ensemble_factorizations = 0;
  int separate_factorizations = 0;
  double ratio() const { return ensemble_seconds / separate_seconds; }
};

/// Times (a) one ensemble run against (b) J independent single-member runs
/// of the same problem on the level-l uniform mesh, solver setup included.
/// Each single-member run uses its own coefficients, so it carries no lag
/// terms.
BenchmarkReport benchmark_ensemble_vs_separate(const ProblemSpec& spec, int k, int level,
                                               double dt, double final_time,
                                               SolverBackend backend = SolverBackend::SparseLU);

}  // namespace ehdg
