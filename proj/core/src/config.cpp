#include "ehdg/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace ehdg {

using nlohmann::json;

namespace {

template <class T>
void read_key(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config key '") + key + "': " + e.what());
  }
}

template <class T>
void write_key(json& j, const char* key, const std::optional<T>& src) {
  if (src) j[key] = *src;
}

CustomProblem read_problem(const json& p) {
  CustomProblem out;
  try {
    out.name = p.value("name", out.name);
    out.final_time = p.value("final_time", out.final_time);
    for (const auto& m : p.at("members")) {
      ConstantMember cm;
      cm.c = m.at("c").get<double>();
      const auto b = m.value("beta", std::vector<double>{0.0, 0.0});
      if (b.size() != 2) throw std::runtime_error("beta needs two components");
      cm.beta = Vec2(b[0], b[1]);
      cm.f = m.value("f", 0.0);
      out.members.push_back(cm);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config key 'problem': ") + e.what());
  }
  if (out.members.empty()) throw std::runtime_error("config key 'problem': no members");
  if (!(out.final_time > 0.0)) throw std::runtime_error("config key 'problem': final_time <= 0");
  return out;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config: top level must be an object");
  RunConfig c;
  read_key(j, "example", c.example);
  read_key(j, "degree", c.degree);
  read_key(j, "levels", c.levels);
  read_key(j, "dt_rule", c.dt_rule);
  read_key(j, "T", c.final_time);
  read_key(j, "out", c.out);
  read_key(j, "strict_admissibility", c.strict_admissibility);
  read_key(j, "mesh_file", c.mesh_file);
  read_key(j, "snapshot", c.snapshot);
  read_key(j, "backend", c.backend);
  if (j.contains("problem")) c.problem = read_problem(j.at("problem"));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(const RunConfig& c, std::ostream& out) {
  json j = json::object();
  write_key(j, "example", c.example);
  write_key(j, "degree", c.degree);
  write_key(j, "levels", c.levels);
  write_key(j, "dt_rule", c.dt_rule);
  write_key(j, "T", c.final_time);
  write_key(j, "out", c.out);
  write_key(j, "strict_admissibility", c.strict_admissibility);
  write_key(j, "mesh_file", c.mesh_file);
  write_key(j, "snapshot", c.snapshot);
  write_key(j, "backend", c.backend);
  if (c.problem) {
    json members = json::array();
    for (const auto& m : c.problem->members)
      members.push_back({{"c", m.c}, {"beta", {m.beta.x(), m.beta.y()}}, {"f", m.f}});
    j["problem"] = {{"name", c.problem->name},
                    {"final_time", c.problem->final_time},
                    {"members", members}};
  }
  out << j.dump(2) << '\n';
}

ProblemSpec problem_from_config(const RunConfig& c) {
  if (c.problem) return constant_problem(c.problem->name, c.problem->members, c.problem->final_time);
  return example(c.example.value_or(1));
}

}  // namespace ehdg
