#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ehdg/types.hpp"

namespace ehdg {

/// Incident elements of a face. Boundary faces use slot 0 only.
struct FaceAdjacency {
  std::array<int, 2> element{-1, -1};
  std::array<int, 2> local_face{-1, -1};
};

/// Conforming triangulation of a 2D domain.
///
/// Elements are stored counter-clockwise. Local face i of an element is the
/// edge opposite local vertex i, traversed from vertex (i+1)%3 to (i+2)%3.
/// Faces are numbered in order of first appearance while scanning elements,
/// so the first incident element is the lower-indexed one; the face's stored
/// vertex pair and normal follow that element's orientation.
class Mesh {
 public:
  Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> elements);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int num_faces() const { return static_cast<int>(faces_.size()); }
  int num_interior_faces() const { return num_interior_faces_; }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& elements() const { return elements_; }
  const std::vector<std::array<int, 2>>& faces() const { return faces_; }
  const std::vector<FaceAdjacency>& face_adjacency() const { return adjacency_; }

  bool is_boundary_face(int f) const { return boundary_[f]; }
  const std::vector<bool>& boundary_mask() const { return boundary_; }

  /// Global face index of local face i of element e.
  int element_face(int e, int i) const { return element_faces_[e][i]; }
  /// True when the element traverses the face opposite to its stored orientation.
  bool face_reversed(int e, int i) const { return reversed_[e][i]; }

  Vec2 face_normal(int f) const;
  double face_length(int f) const;
  double element_area(int e) const;
  double h_max() const { return h_max_; }

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> elements_;
  std::vector<std::array<int, 2>> faces_;
  std::vector<FaceAdjacency> adjacency_;
  std::vector<bool> boundary_;
  std::vector<std::array<int, 3>> element_faces_;
  std::vector<std::array<bool, 3>> reversed_;
  int num_interior_faces_ = 0;
  double h_max_ = 0.0;
};

/// n x n cells on [0,1]^2, each split along its lower-left to upper-right
/// diagonal. Throws std::invalid_argument for n < 1.
Mesh build_uniform_square_mesh(int n);

/// Affine map data of one element.
struct ElementGeometry {
  std::array<Vec2, 3> vertices;
  Mat2 jacobian;        // columns v1-v0, v2-v0
  Mat2 inverse_transpose;
  double det = 0.0;     // 2 x area
  double area = 0.0;
  std::array<Vec2, 3> normals;     // outward unit normals by local face
  std::array<double, 3> lengths;
  std::array<bool, 3> boundary;
  std::array<bool, 3> reversed;

  Vec2 map(const Vec2& ref) const { return vertices[0] + jacobian * ref; }
};

/// Throws std::out_of_range for a bad index.
ElementGeometry element_geometry(const Mesh& mesh, int element);

/// Plain-text format: "nv ne nf", nv lines "x y", ne lines "v0 v1 v2",
/// nf lines "v0 v1 b" (0-based, b = 1 for boundary faces).
///
/// On read, connectivity is rebuilt from the elements, clockwise elements are
/// reoriented and the listed faces are checked against it.
Mesh read_mesh(std::istream& in);
void write_mesh(const Mesh& mesh, std::ostream& out);

/// Bucketed point location.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh);
  /// Element containing x and its reference coordinates, if any.
  std::optional<std::pair<int, Vec2>> locate(const Vec2& x) const;

 private:
  const Mesh& mesh_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

}  // namespace ehdg
