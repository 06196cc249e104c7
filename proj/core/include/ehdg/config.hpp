#pragma once

// Run configuration file (JSON). All keys are optional:
//
//   {
//     "example": 1,                  // built-in problem 1, 2 or 3
//     "degree": 1,
//     "levels": "1..5",
//     "dt_rule": "h3",               // h, h3 or fixed=<v>
//     "T": 1.0,
//     "out": "results",
//     "strict_admissibility": false,
//     "mesh_file": "square.mesh",
//     "snapshot": "final",           // none, final or every=<m>
//     "backend": "lu",               // lu or gmres
//     "problem": {                   // replaces "example"
//       "name": "custom",
//       "final_time": 0.1,
//       "members": [ {"c": 60, "beta": [2, 3], "f": 2}, ... ]
//     }
//   }
//
// Custom problems have constant c, beta and f, with g = 0 and u0 = 0.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ehdg/examples.hpp"

namespace ehdg {

struct CustomProblem {
  std::string name = "custom";
  double final_time = 0.1;
  std::vector<ConstantMember> members;
};

struct RunConfig {
  std::optional<int> example;
  std::optional<int> degree;
  std::optional<std::string> levels;
  std::optional<std::string> dt_rule;
  std::optional<double> final_time;
  std::optional<std::string> out;
  std::optional<bool> strict_admissibility;
  std::optional<std::string> mesh_file;
  std::optional<std::string> snapshot;
  std::optional<std::string> backend;
  std::optional<CustomProblem> problem;
};

/// Throws std::runtime_error with the offending key on malformed input.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
void write_config(const RunConfig& config, std::ostream& out);

/// The custom problem if present, otherwise the selected example (default 1).
ProblemSpec problem_from_config(const RunConfig& config);

}  // namespace ehdg
