// Command-line driver: convergence studies, single runs with snapshots,
// ensemble-vs-separate timing and admissibility checks.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ehdg/benchmark.hpp"
#include "ehdg/config.hpp"
#include "ehdg/convergence.hpp"
#include "ehdg/ensemble_solver.hpp"
#include "ehdg/error_norms.hpp"
#include "ehdg/examples.hpp"
#include "ehdg/output.hpp"
#include "ehdg/postprocess.hpp"

namespace {

using namespace ehdg;

struct Settings {
  ProblemSpec spec;
  int degree = 1;
  int level_min = 1, level_max = 4;
  DtRule dt_rule;
  double final_time = 1.0;
  std::string out = "results";
  bool strict = false;
  std::optional<std::string> mesh_file;
  std::string snapshot = "final";
  SolverBackend backend = SolverBackend::SparseLU;
};

std::pair<int, int> parse_levels(const std::string& s) {
  const auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      const int l = std::stoi(s);
      return {l, l};
    }
    return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
  } catch (const std::exception&) {
    throw std::invalid_argument("bad level range '" + s + "' (expected a..b)");
  }
}

SolverBackend parse_backend(const std::string& s) {
  if (s == "lu") return SolverBackend::SparseLU;
  if (s == "gmres") return SolverBackend::GmresIlu;
  throw std::invalid_argument("unknown backend '" + s + "' (expected lu or gmres)");
}

Settings resolve(const RunConfig& c) {
  Settings s;
  s.spec = problem_from_config(c);
  s.degree = c.degree.value_or(1);
  if (s.degree < 0 || s.degree > kMaxSchemeDegree)
    throw std::invalid_argument("degree must be in 0.." + std::to_string(kMaxSchemeDegree));
  if (c.levels) std::tie(s.level_min, s.level_max) = parse_levels(*c.levels);
  s.dt_rule = DtRule::parse(c.dt_rule.value_or(s.degree == 0 ? "h" : "h3"));
  s.final_time = c.final_time.value_or(s.spec.final_time);
  s.spec.final_time = s.final_time;
  s.out = c.out.value_or("results");
  s.strict = c.strict_admissibility.value_or(false);
  s.mesh_file = c.mesh_file;
  s.snapshot = c.snapshot.value_or("final");
  s.backend = parse_backend(c.backend.value_or("lu"));
  return s;
}

Mesh load_mesh(const Settings& s) {
  if (!s.mesh_file) return build_uniform_square_mesh(1 << s.level_max);
  std::ifstream in(*s.mesh_file);
  if (!in) throw std::runtime_error("cannot open mesh file '" + *s.mesh_file + "'");
  return read_mesh(in);
}

double mesh_dt(const Settings& s, const Mesh& mesh) {
  return snap_dt(s.final_time, s.dt_rule.raw(s.mesh_file ? mesh.h_max() : level_h(s.level_max)));
}

// Prints the report; returns false if strict mode should stop.
bool admissibility(const Settings& s, const Mesh& mesh, double dt) {
  const TimeGrid grid{dt, step_count(s.final_time, dt)};
  const AdmissibilityReport r = check_admissibility(s.spec, mesh, grid);
  std::printf("admissibility: %s (%lld samples, min c = %.6g, %lld violations)\n",
              r.ok ? "ok" : "VIOLATED", r.samples, r.min_c, r.violation_count);
  for (const auto& v : r.violations)
    std::printf("  member %d step %d at (%.4f, %.4f): %s %.6g vs %.6g\n", v.member + 1, v.step,
                v.point.x(), v.point.y(),
                v.kind == AdmissibilityViolation::Kind::NonPositive ? "c =" : "|cbar - c| =",
                v.lhs, v.rhs);
  return r.ok || !s.strict;
}

int cmd_converge(const Settings& s) {
  if (!s.spec.members.front().has_exact()) {
    std::fprintf(stderr, "problem %s has no exact solution\n", s.spec.name.c_str());
    return 2;
  }
  {
    const Mesh coarse = build_uniform_square_mesh(1 << s.level_min);
    if (!admissibility(s, coarse, snap_dt(s.final_time, s.dt_rule.raw(level_h(s.level_min)))))
      return 3;
  }
  StudyOptions so;
  so.degree = s.degree;
  so.level_min = s.level_min;
  so.level_max = s.level_max;
  so.dt_rule = s.dt_rule;
  so.backend = s.backend;
  so.log = [](const std::string& line) { std::printf("%s\n", line.c_str()); std::fflush(stdout); };
  const ConvergenceTable table = convergence_study(s.spec, so);
  std::printf("%5s %10s %6s %12s %6s %12s %6s %12s %6s\n", "level", "h/sqrt2", "member", "Eq",
              "rate", "Eu", "rate", "Eu*", "rate");
  for (const auto& r : table.rows) {
    const auto rate = [&](double v) {
      char b[16];
      if (r.has_rates)
        std::snprintf(b, sizeof b, "%6.2f", v);
      else
        std::snprintf(b, sizeof b, "%6s", "");
      return std::string(b);
    };
    std::printf("%5d %10.6g %6d %12.4e %s %12.4e %s %12.4e %s\n", r.level, r.h_over_sqrt2,
                r.member, r.eq, rate(r.eq_rate).c_str(), r.eu, rate(r.eu_rate).c_str(), r.eustar,
                rate(r.eustar_rate).c_str());
  }
  const std::string path = (std::filesystem::path(s.out) / "convergence.csv").string();
  auto out = open_output(path);
  write_convergence_csv(table, out);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

void write_snapshots(const Settings& s, const Mesh& mesh, const EnsembleState& state,
                     const std::string& tag) {
  std::filesystem::create_directories(s.out);
  for (int j = 0; j < s.spec.size(); ++j) {
    const double t = state.time;
    const Postprocessor post(mesh, s.degree,
                             [&c = s.spec.members[j].c, t](const Vec2& x) { return c(x, t); });
    const ProjectedField ustar = post.apply(state.members[j].q, state.members[j].u);
    const std::string stem = (std::filesystem::path(s.out) /
                              (s.spec.name + "_u" + std::to_string(j + 1) + "_" + tag))
                                 .string();
    auto csv = open_output(stem + ".csv");
    write_snapshot_csv(mesh, j + 1, state.members[j].u, ustar, csv);
    auto vtk = open_output(stem + ".vtk");
    write_vtk(mesh, state.members[j].u, ustar, vtk, s.spec.name + " member " + std::to_string(j + 1));
  }
}

int cmd_run(const Settings& s) {
  const Mesh mesh = load_mesh(s);
  const double dt = mesh_dt(s, mesh);
  const int steps = step_count(s.final_time, dt);
  std::printf("%s: %d elements, k=%d, dt=%.6g, %d steps\n", s.spec.name.c_str(),
              mesh.num_elements(), s.degree, dt, steps);
  if (!admissibility(s, mesh, dt)) return 3;

  int every = 0;
  if (s.snapshot.rfind("every=", 0) == 0) {
    every = std::stoi(s.snapshot.substr(6));
    if (every < 1) throw std::invalid_argument("snapshot interval must be positive");
  } else if (s.snapshot != "none" && s.snapshot != "final") {
    throw std::invalid_argument("unknown snapshot mode '" + s.snapshot + "'");
  }

  SolverOptions so;
  so.degree = s.degree;
  so.dt = dt;
  so.backend = s.backend;
  EnsembleSolver solver(s.spec, mesh, so);
  std::printf("tau = %.6g\n", solver.tau());

  std::vector<StepObserver> observers;
  std::optional<ErrorAccumulator> errors;
  bool exact = true;
  for (const auto& m : s.spec.members) exact = exact && m.has_exact();
  if (exact) {
    errors.emplace(s.spec, mesh, s.degree, dt);
    observers.push_back(errors->observer());
  }
  if (every > 0)
    observers.push_back([&](int n, double, const EnsembleState& st) {
      if (n % every == 0) write_snapshots(s, mesh, st, "step" + std::to_string(n));
    });
  const EnsembleState final_state = solver.run(solver.initial_state(), steps, observers);
  if (s.snapshot == "final") write_snapshots(s, mesh, final_state, "final");

  std::printf("factorizations: %d, last residual: %.3e\n", solver.stats().factorizations,
              solver.stats().last_residual);
  if (errors) {
    const auto e = errors->result();
    for (std::size_t j = 0; j < e.size(); ++j)
      std::printf("member %zu: Eq = %.4e  Eu = %.4e  Eu* = %.4e\n", j + 1, e[j].eq, e[j].eu,
                  e[j].eustar);
  }
  return 0;
}

int cmd_bench(const Settings& s) {
  const double dt = snap_dt(s.final_time, s.dt_rule.raw(level_h(s.level_max)));
  const BenchmarkReport r =
      benchmark_ensemble_vs_separate(s.spec, s.degree, s.level_max, dt, s.final_time, s.backend);
  std::printf("members %d, steps %d\n", r.members, r.steps);
  std::printf("ensemble: %.3fs, %d factorization(s)\n", r.ensemble_seconds,
              r.ensemble_factorizations);
  std::printf("separate: %.3fs, %d factorization(s)\n", r.separate_seconds,
              r.separate_factorizations);
  std::printf("ratio: %.3f\n", r.ratio());
  return 0;
}

int cmd_check(const Settings& s) {
  const Mesh mesh = load_mesh(s);
  const double dt = mesh_dt(s, mesh);
  const TauChoice tau = choose_tau(s.spec, mesh, {dt, step_count(s.final_time, dt)});
  std::printf("tau = %.6g (sup |beta|_max = %.6g, %lld samples%s)\n", tau.tau, tau.beta_sup,
              tau.samples, tau.condition_met ? "" : ", raised to satisfy the face condition");
  return admissibility(s, mesh, dt) ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble HDG solver for parameterized convection-diffusion problems"};
  app.require_subcommand(1);

  std::string config_path;
  int example = 1, degree = 1;
  std::string levels, dt_rule, out, mesh_file, snapshot, backend;
  double final_time = 0.0;
  bool strict = false;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--example", example, "built-in problem")->check(CLI::IsMember({1, 2, 3}));
    sub->add_option("--degree", degree, "polynomial degree k")->check(CLI::Range(0, kMaxSchemeDegree));
    sub->add_option("--levels", levels, "mesh levels a..b (n = 2^level)");
    sub->add_option("--dt-rule", dt_rule, "h, h3 or fixed=<v>");
    sub->add_option("--T", final_time, "final time");
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--strict-admissibility", strict, "stop if the ensemble condition fails");
    sub->add_option("--mesh-file", mesh_file, "mesh file instead of the uniform square")
        ->check(CLI::ExistingFile);
    sub->add_option("--snapshot", snapshot, "none, final or every=<m>");
    sub->add_option("--backend", backend, "lu or gmres");
  };
  CLI::App* converge = app.add_subcommand("converge", "convergence study over mesh levels");
  CLI::App* run = app.add_subcommand("run", "single run on the finest level or a mesh file");
  CLI::App* bench = app.add_subcommand("bench", "ensemble vs separate timing");
  CLI::App* check = app.add_subcommand("check", "admissibility and tau report");
  for (CLI::App* sub : {converge, run, bench, check}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--example")) {
      cfg.example = example;
      cfg.problem.reset();
    }
    if (sub->count("--degree")) cfg.degree = degree;
    if (sub->count("--levels")) cfg.levels = levels;
    if (sub->count("--dt-rule")) cfg.dt_rule = dt_rule;
    if (sub->count("--T")) cfg.final_time = final_time;
    if (sub->count("--out")) cfg.out = out;
    if (strict) cfg.strict_admissibility = true;
    if (sub->count("--mesh-file")) cfg.mesh_file = mesh_file;
    if (sub->count("--snapshot")) cfg.snapshot = snapshot;
    if (sub->count("--backend")) cfg.backend = backend;
    const Settings s = resolve(cfg);

    if (sub == converge) return cmd_converge(s);
    if (sub == run) return cmd_run(s);
    if (sub == bench) return cmd_bench(s);
    return cmd_check(s);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
