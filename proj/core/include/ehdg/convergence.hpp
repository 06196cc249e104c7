#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ehdg/ensemble_solver.hpp"
#include "ehdg/error_norms.hpp"

namespace ehdg {

/// Time step as a function of the mesh diameter h = sqrt(2)/n.
struct DtRule {
  enum class Kind { H, H3, Fixed };
  Kind kind = Kind::H;
  double value = 0.0;  // Fixed only

  /// "h", "h3" or "fixed=<v>". Throws std::invalid_argument otherwise.
  static DtRule parse(const std::string& text);
  std::string str() const;
  double raw(double h) const;
};

/// dt = T / ceil(T / dt_raw): never larger than dt_raw, and T/dt is integral.
double snap_dt(double final_time, double dt_raw);

/// Mesh diameter of the level-l uniform mesh (n = 2^l).
double level_h(int level);

/// log2(coarse / fine).
double convergence_rate(double coarse, double fine);

struct ConvergenceRow {
  int level = 0;
  double h_over_sqrt2 = 0.0;
  int member = 0;  // 1-based
  double eq = 0.0, eq_rate = 0.0;
  double eu = 0.0, eu_rate = 0.0;
  double eustar = 0.0, eustar_rate = 0.0;
  bool has_rates = false;  // false on the first level
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;

  /// Row of a given level and 1-based member; throws std::out_of_range.
  const ConvergenceRow& at(int level, int member) const;
};

struct StudyOptions {
  int degree = 1;
  int level_min = 1;
  int level_max = 5;
  DtRule dt_rule;
  SolverBackend backend = SolverBackend::SparseLU;
  /// Called after each level with a one-line summary.
  std::function<void(const std::string&)> log;
};

ConvergenceTable convergence_study(const ProblemSpec& spec, const StudyOptions& options);

/// Appends one level's rows, filling rates from the previous level if present.
void append_level(ConvergenceTable& table, int level, const std::vector<MemberErrors>& errors);

}  // namespace ehdg
