#include "ehdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace ehdg {

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

// Outward normal of an edge a->b of a counter-clockwise element.
Vec2 outward_normal(const Vec2& a, const Vec2& b) {
  const Vec2 t = b - a;
  return Vec2(t.y(), -t.x()).normalized();
}

}  // namespace

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements)
    : vertices_(std::move(vertices)), elements_(std::move(elements)) {
  const int nv = num_vertices();
  std::map<std::pair<int, int>, int> edge_index;
  element_faces_.resize(elements_.size());
  reversed_.resize(elements_.size());

  for (int e = 0; e < num_elements(); ++e) {
    const auto& el = elements_[e];
    for (int v : el)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("element " + std::to_string(e) +
                                    " references missing vertex " + std::to_string(v));
    const double area = signed_area(vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]);
    if (!(area > 0.0))
      throw std::invalid_argument("element " + std::to_string(e) +
                                  " is degenerate or clockwise");
    for (int i = 0; i < 3; ++i) {
      const int a = el[(i + 1) % 3];
      const int b = el[(i + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, num_faces());
      const int f = it->second;
      if (inserted) {
        faces_.push_back({a, b});
        adjacency_.push_back({});
        adjacency_.back().element[0] = e;
        adjacency_.back().local_face[0] = i;
        reversed_[e][i] = false;
      } else {
        auto& adj = adjacency_[f];
        if (adj.element[1] != -1)
          throw std::invalid_argument("face shared by more than two elements");
        adj.element[1] = e;
        adj.local_face[1] = i;
        reversed_[e][i] = faces_[f][0] != a;
      }
      element_faces_[e][i] = f;
    }
  }

  boundary_.resize(faces_.size());
  for (int f = 0; f < num_faces(); ++f) {
    boundary_[f] = adjacency_[f].element[1] == -1;
    if (!boundary_[f]) ++num_interior_faces_;
  }
  for (int f = 0; f < num_faces(); ++f)
    h_max_ = std::max(h_max_, face_length(f));
}

Vec2 Mesh::face_normal(int f) const {
  return outward_normal(vertices_[faces_[f][0]], vertices_[faces_[f][1]]);
}

double Mesh::face_length(int f) const {
  return (vertices_[faces_[f][1]] - vertices_[faces_[f][0]]).norm();
}

double Mesh::element_area(int e) const {
  const auto& el = elements_[e];
  return signed_area(vertices_[el[0]], vertices_[el[1]], vertices_[el[2]]);
}

Mesh build_uniform_square_mesh(int n) {
  if (n < 1) throw std::invalid_argument("uniform mesh needs n >= 1 subdivisions");
  std::vector<Vec2> vertices;
  vertices.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
  std::vector<std::array<int, 3>> elements;
  elements.reserve(2 * n * n);
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(std::move(vertices), std::move(elements));
}

ElementGeometry element_geometry(const Mesh& mesh, int element) {
  if (element < 0 || element >= mesh.num_elements())
    throw std::out_of_range("element index " + std::to_string(element) + " out of range");
  ElementGeometry g;
  const auto& el = mesh.elements()[element];
  for (int i = 0; i < 3; ++i) g.vertices[i] = mesh.vertices()[el[i]];
  g.jacobian.col(0) = g.vertices[1] - g.vertices[0];
  g.jacobian.col(1) = g.vertices[2] - g.vertices[0];
  g.det = g.jacobian.determinant();
  g.area = 0.5 * g.det;
  g.inverse_transpose = g.jacobian.inverse().transpose();
  for (int i = 0; i < 3; ++i) {
    const Vec2& a = g.vertices[(i + 1) % 3];
    const Vec2& b = g.vertices[(i + 2) % 3];
    g.normals[i] = outward_normal(a, b);
    g.lengths[i] = (b - a).norm();
    const int f = mesh.element_face(element, i);
    g.boundary[i] = mesh.is_boundary_face(f);
    g.reversed[i] = mesh.face_reversed(element, i);
  }
  return g;
}

Mesh read_mesh(std::istream& in) {
  int nv = 0, ne = 0, nf = 0;
  if (!(in >> nv >> ne >> nf) || nv < 3 || ne < 1 || nf < 3)
    throw std::runtime_error("mesh file: bad header");
  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices)
    if (!(in >> v.x() >> v.y())) throw std::runtime_error("mesh file: truncated vertex list");
  std::vector<std::array<int, 3>> elements(ne);
  for (auto& el : elements) {
    if (!(in >> el[0] >> el[1] >> el[2]))
      throw std::runtime_error("mesh file: truncated element list");
    for (int v : el)
      if (v < 0 || v >= nv) throw std::runtime_error("mesh file: vertex index out of range");
    if (signed_area(vertices[el[0]], vertices[el[1]], vertices[el[2]]) < 0.0)
      std::swap(el[1], el[2]);
  }
  std::map<std::pair<int, int>, bool> listed;
  for (int f = 0; f < nf; ++f) {
    int a = 0, b = 0, flag = 0;
    if (!(in >> a >> b >> flag)) throw std::runtime_error("mesh file: truncated face list");
    const auto key = std::minmax(a, b);
    listed[{key.first, key.second}] = flag != 0;
  }
  Mesh mesh(std::move(vertices), std::move(elements));
  if (static_cast<int>(listed.size()) != mesh.num_faces() || nf != mesh.num_faces())
    throw std::runtime_error("mesh file: face list does not match element connectivity");
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const auto key = std::minmax(mesh.faces()[f][0], mesh.faces()[f][1]);
    const auto it = listed.find({key.first, key.second});
    if (it == listed.end() || it->second != mesh.is_boundary_face(f))
      throw std::runtime_error("mesh file: face " + std::to_string(f) +
                               " missing or boundary flag inconsistent");
  }
  return mesh;
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
  out << mesh.num_vertices() << ' ' << mesh.num_elements() << ' ' << mesh.num_faces() << '\n';
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (const auto& el : mesh.elements()) out << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';
  for (int f = 0; f < mesh.num_faces(); ++f)
    out << mesh.faces()[f][0] << ' ' << mesh.faces()[f][1] << ' '
        << (mesh.is_boundary_face(f) ? 1 : 0) << '\n';
}

PointLocator::PointLocator(const Mesh& mesh) : mesh_(mesh) {
  lo_ = hi_ = mesh.vertices().front();
  for (const auto& v : mesh.vertices()) {
    lo_ = lo_.cwiseMin(v);
    hi_ = hi_.cwiseMax(v);
  }
  const int side = std::max(1, static_cast<int>(std::sqrt(mesh.num_elements() / 2.0)));
  nx_ = ny_ = side;
  buckets_.resize(nx_ * ny_);
  const Vec2 span = (hi_ - lo_).cwiseMax(Vec2::Constant(1e-300));
  const auto cell = [&](const Vec2& p, int& i, int& j) {
    i = std::clamp(static_cast<int>((p.x() - lo_.x()) / span.x() * nx_), 0, nx_ - 1);
    j = std::clamp(static_cast<int>((p.y() - lo_.y()) / span.y() * ny_), 0, ny_ - 1);
  };
  for (int e = 0; e < mesh.num_elements(); ++e) {
    Vec2 a = mesh.vertices()[mesh.elements()[e][0]], b = a;
    for (int v : mesh.elements()[e]) {
      a = a.cwiseMin(mesh.vertices()[v]);
      b = b.cwiseMax(mesh.vertices()[v]);
    }
    int i0, j0, i1, j1;
    cell(a, i0, j0);
    cell(b, i1, j1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) buckets_[j * nx_ + i].push_back(e);
  }
}

std::optional<std::pair<int, Vec2>> PointLocator::locate(const Vec2& x) const {
  const Vec2 span = (hi_ - lo_).cwiseMax(Vec2::Constant(1e-300));
  const int i = std::clamp(static_cast<int>((x.x() - lo_.x()) / span.x() * nx_), 0, nx_ - 1);
  const int j = std::clamp(static_cast<int>((x.y() - lo_.y()) / span.y() * ny_), 0, ny_ - 1);
  constexpr double tol = 1e-12;
  for (int e : buckets_[j * nx_ + i]) {
    const auto& el = mesh_.elements()[e];
    const Vec2& v0 = mesh_.vertices()[el[0]];
    Mat2 jac;
    jac.col(0) = mesh_.vertices()[el[1]] - v0;
    jac.col(1) = mesh_.vertices()[el[2]] - v0;
    const Vec2 ref = jac.inverse() * (x - v0);
    if (ref.x() >= -tol && ref.y() >= -tol && ref.x() + ref.y() <= 1.0 + tol)
      return std::make_pair(e, ref);
  }
  return std::nullopt;
}

}  // namespace ehdg
