#include "ehdg/convergence.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ehdg {

DtRule DtRule::parse(const std::string& text) {
  DtRule r;
  if (text == "h") {
    r.kind = Kind::H;
  } else if (text == "h3") {
    r.kind = Kind::H3;
  } else if (text.rfind("fixed=", 0) == 0) {
    r.kind = Kind::Fixed;
    std::size_t used = 0;
    const std::string num = text.substr(6);
    try {
      r.value = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != num.size() || !(r.value > 0.0))
      throw std::invalid_argument("bad fixed time step '" + num + "'");
  } else {
    throw std::invalid_argument("unknown dt rule '" + text + "' (expected h, h3 or fixed=<v>)");
  }
  return r;
}

std::string DtRule::str() const {
  switch (kind) {
    case Kind::H: return "h";
    case Kind::H3: return "h3";
    default: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "fixed=%.17g", value);
      return buf;
    }
  }
}

double DtRule::raw(double h) const {
  switch (kind) {
    case Kind::H: return h;
    case Kind::H3: return h * h * h;
    default: return value;
  }
}

double snap_dt(double final_time, double dt_raw) {
  if (!(dt_raw > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  const double steps = std::ceil(final_time / dt_raw - 1e-9);
  return final_time / std::max(steps, 1.0);
}

double level_h(int level) {
  if (level < 0) throw std::invalid_argument("level must be non-negative");
  return std::sqrt(2.0) / static_cast<double>(1 << level);
}

double convergence_rate(double coarse, double fine) { return std::log2(coarse / fine); }

const ConvergenceRow& ConvergenceTable::at(int level, int member) const {
  for (const auto& r : rows)
    if (r.level == level && r.member == member) return r;
  throw std::out_of_range("no row for level " + std::to_string(level) + ", member " +
                          std::to_string(member));
}

void append_level(ConvergenceTable& table, int level, const std::vector<MemberErrors>& errors) {
  for (std::size_t j = 0; j < errors.size(); ++j) {
    ConvergenceRow row;
    row.level = level;
    row.h_over_sqrt2 = 1.0 / static_cast<double>(1 << level);
    row.member = static_cast<int>(j) + 1;
    row.eq = errors[j].eq;
    row.eu = errors[j].eu;
    row.eustar = errors[j].eustar;
    for (auto it = table.rows.rbegin(); it != table.rows.rend(); ++it) {
      if (it->member != row.member || it->level >= level) continue;
      row.has_rates = true;
      row.eq_rate = convergence_rate(it->eq, row.eq);
      row.eu_rate = convergence_rate(it->eu, row.eu);
      row.eustar_rate = convergence_rate(it->eustar, row.eustar);
      break;
    }
    table.rows.push_back(row);
  }
}

ConvergenceTable convergence_study(const ProblemSpec& spec, const StudyOptions& options) {
  if (options.level_min < 0 || options.level_max < options.level_min)
    throw std::invalid_argument("bad level range");
  ConvergenceTable table;
  for (int level = options.level_min; level <= options.level_max; ++level) {
    const auto start = std::chrono::steady_clock::now();
    const Mesh mesh = build_uniform_square_mesh(1 << level);
    SolverOptions so;
    so.degree = options.degree;
    so.dt = snap_dt(spec.final_time, options.dt_rule.raw(level_h(level)));
    so.backend = options.backend;
    const auto errors = compute_errors(spec, mesh, so);
    append_level(table, level, errors);
    if (options.log) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      char buf[160];
      std::snprintf(buf, sizeof buf, "level %d: n=%d dt=%.6g steps=%d  %.2fs", level, 1 << level,
                    so.dt, step_count(spec.final_time, so.dt), secs);
      options.log(buf);
    }
  }
  return table;
}

}  // namespace ehdg
