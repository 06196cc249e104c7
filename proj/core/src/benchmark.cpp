#include "ehdg/benchmark.hpp"

#include <chrono>

namespace ehdg {

namespace {

struct Timed {
  double seconds;
  int factorizations;
};

Timed timed_run(const ProblemSpec& spec, const Mesh& mesh, const SolverOptions& options,
                int steps) {
  const auto start = std::chrono::steady_clock::now();
  EnsembleSolver solver(spec, mesh, options);
  solver.run(solver.initial_state(), steps);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {secs, solver.stats().factorizations};
}

}  // namespace

BenchmarkReport benchmark_ensemble_vs_separate(const ProblemSpec& spec, int k, int level,
                                               double dt, double final_time,
                                               SolverBackend backend) {
  const Mesh mesh = build_uniform_square_mesh(1 << level);
  const int steps = step_count(final_time, dt);
  SolverOptions options;
  options.degree = k;
  options.dt = dt;
  options.backend = backend;
  options.check_residual = false;
  // one tau for every run so the matrices differ only by coefficients
  options.tau = choose_tau(spec, mesh, {dt, steps}).tau;

  BenchmarkReport report;
  report.members = spec.size();
  report.steps = steps;
  const Timed ens = timed_run(spec, mesh, options, steps);
  report.ensemble_seconds = ens.seconds;
  report.ensemble_factorizations = ens.factorizations;
  for (const auto& m : spec.members) {
    ProblemSpec single = spec;
    single.members = {m};
    const Timed one = timed_run(single, mesh, options, steps);
    report.separate_seconds += one.seconds;
    report.separate_factorizations += one.factorizations;
  }
  return report;
}

}  // namespace ehdg
