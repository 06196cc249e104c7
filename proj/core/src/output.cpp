#include "ehdg/output.hpp"

#include <cstdio>
#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ehdg/polybasis.hpp"

namespace ehdg {

namespace {

constexpr const char* kHeader =
    "level,h_over_sqrt2,member,Eq,Eq_rate,Eu,Eu_rate,Eustar,Eustar_rate";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_convergence_csv(const ConvergenceTable& table, std::ostream& out) {
  out << kHeader << '\n';
  for (const auto& r : table.rows) {
    const auto rate = [&](double v) { return r.has_rates ? num(v) : std::string(); };
    out << r.level << ',' << num(r.h_over_sqrt2) << ',' << r.member << ',' << num(r.eq) << ','
        << rate(r.eq_rate) << ',' << num(r.eu) << ',' << rate(r.eu_rate) << ',' << num(r.eustar)
        << ',' << rate(r.eustar_rate) << '\n';
  }
}

ConvergenceTable read_convergence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw std::runtime_error("convergence CSV: unexpected header");
  ConvergenceTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 9)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 9 cells");
    ConvergenceRow r;
    r.level = static_cast<int>(parse_double(c[0], lineno));
    r.h_over_sqrt2 = parse_double(c[1], lineno);
    r.member = static_cast<int>(parse_double(c[2], lineno));
    r.eq = parse_double(c[3], lineno);
    r.eu = parse_double(c[5], lineno);
    r.eustar = parse_double(c[7], lineno);
    r.has_rates = !c[4].empty();
    if (r.has_rates) {
      r.eq_rate = parse_double(c[4], lineno);
      r.eu_rate = parse_double(c[6], lineno);
      r.eustar_rate = parse_double(c[8], lineno);
    }
    table.rows.push_back(r);
  }
  return table;
}

namespace {

const std::array<Vec2, 4> kSnapshotPoints = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1),
                                             Vec2(1.0 / 3, 1.0 / 3)};

}  // namespace

void write_snapshot_csv(const Mesh& mesh, int member, const ProjectedField& u,
                        const ProjectedField& ustar, std::ostream& out, bool header) {
  if (header) out << "member,element,point,x,y,u,ustar\n";
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    for (int p = 0; p < 4; ++p) {
      const Vec2 x = g.map(kSnapshotPoints[p]);
      out << member << ',' << e << ',' << p << ',' << num(x.x()) << ',' << num(x.y()) << ','
          << num(u.value(mesh, e, kSnapshotPoints[p])) << ','
          << num(ustar.value(mesh, e, kSnapshotPoints[p])) << '\n';
    }
  }
}

void write_grid_csv(const Mesh& mesh, const ProjectedField& u, int m, std::ostream& out) {
  if (m < 1) throw std::invalid_argument("grid needs at least one interval");
  Vec2 lo = mesh.vertices().front(), hi = lo;
  for (const auto& v : mesh.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const PointLocator locator(mesh);
  out << "x,y,u\n";
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= m; ++i) {
      const Vec2 x(lo.x() + (hi.x() - lo.x()) * i / m, lo.y() + (hi.y() - lo.y()) * j / m);
      const auto hit = locator.locate(x);
      if (!hit) continue;
      out << num(x.x()) << ',' << num(x.y()) << ',' << num(u.value(mesh, hit->first, hit->second))
          << '\n';
    }
}

void write_vtk(const Mesh& mesh, const ProjectedField& u, const ProjectedField& ustar,
               std::ostream& out, const std::string& title) {
  const int ne = mesh.num_elements();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << 3 * ne << " double\n";
  for (int e = 0; e < ne; ++e)
    for (int v : mesh.elements()[e]) {
      const Vec2& x = mesh.vertices()[v];
      out << num(x.x()) << ' ' << num(x.y()) << " 0\n";
    }
  out << "POLYGONS " << ne << ' ' << 4 * ne << '\n';
  for (int e = 0; e < ne; ++e) out << "3 " << 3 * e << ' ' << 3 * e + 1 << ' ' << 3 * e + 2 << '\n';
  out << "POINT_DATA " << 3 * ne << '\n';
  for (const auto& [name, field] :
       {std::pair<const char*, const ProjectedField*>{"u", &u}, {"ustar", &ustar}}) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int e = 0; e < ne; ++e)
      for (int p = 0; p < 3; ++p) out << num(field->value(mesh, e, kSnapshotPoints[p])) << '\n';
  }
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace ehdg
