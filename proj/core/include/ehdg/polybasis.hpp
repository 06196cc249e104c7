#pragma once

// Polynomial spaces on the reference triangle (0,0),(1,0),(0,1) and on the
// reference edge [0,1], plus the Gauss rules used to integrate them.
//
// The element basis of degree k is the monomial basis x^a y^b (ordered by
// total degree) orthonormalized against the reference-triangle L2 inner
// product. Because the orthonormalization is a Cholesky factorization of the
// nested monomial Gram matrix, the basis is hierarchical: the first
// element_dim(k-1) functions of the degree-k basis are exactly the degree-(k-1)
// basis. Several modules rely on this.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "ehdg/types.hpp"

namespace ehdg {

inline constexpr int kMaxSchemeDegree = 3;
inline constexpr int kMaxBasisDegree = 6;

constexpr int element_dim(int k) { return (k + 1) * (k + 2) / 2; }
constexpr int face_dim(int k) { return k + 1; }

struct TriangleRule {
  int order = 0;
  std::vector<Vec2> points;
  std::vector<double> weights;  // sum to 1/2
  int size() const { return static_cast<int>(weights.size()); }
};

struct EdgeRule {
  int order = 0;
  std::vector<double> points;  // in [0,1]
  std::vector<double> weights;  // sum to 1
  int size() const { return static_cast<int>(weights.size()); }
};

/// Collapsed-coordinate Gauss rule exact for total degree <= order.
/// Throws std::invalid_argument unless 1 <= order <= 20.
TriangleRule triangle_quadrature(int order);

/// Gauss-Legendre rule on [0,1] exact for degree <= order, 1 <= order <= 20.
EdgeRule edge_quadrature(int order);

/// Monomial exponents (a, b) of x^a y^b in basis order for degree k.
std::vector<std::array<int, 2>> monomial_exponents(int k);

/// Coefficients R with phi_i = sum_j R(i,j) x^{a_j} y^{b_j}. Lower triangular.
const Eigen::MatrixXd& orthonormal_coefficients(int k);

struct ElementBasis {
  int degree = 0;
  int dim = 0;
  Eigen::MatrixXd values;              // dim x nq
  std::array<Eigen::MatrixXd, 2> grad;  // reference d/dx, d/dy, each dim x nq
};

struct FaceBasis {
  int degree = 0;
  int dim = 0;
  Eigen::MatrixXd values;  // dim x nq
};

ElementBasis eval_element_basis(int k, std::span<const Vec2> points);
FaceBasis eval_face_basis(int k, std::span<const double> points);

/// Single-point evaluation helpers.
Eigen::VectorXd element_basis_at(int k, const Vec2& ref);
Eigen::Matrix<double, Eigen::Dynamic, 2> element_basis_gradient_at(int k, const Vec2& ref);

/// Point on local edge i of the reference triangle at parameter s. Edge i runs
/// from vertex (i+1)%3 to vertex (i+2)%3.
Vec2 reference_edge_point(int local_face, double s);

/// Precomputed tables for a scheme of degree k.
///
/// Rules: element integrals use order 2k+2, data terms (sources, boundary
/// data, exact solutions, error norms) use order 2k+4, and face integrals the
/// same two orders on edges.
class ReferenceTables {
 public:
  explicit ReferenceTables(int k);

  int degree() const { return k_; }
  int np() const { return element_dim(k_); }
  int nf() const { return face_dim(k_); }

  struct ElementSet {
    TriangleRule rule;
    ElementBasis basis;       // degree k
    ElementBasis basis_next;  // degree k+1
  };
  struct FaceSet {
    EdgeRule rule;
    // Indexed by local face.
    std::array<std::vector<Vec2>, 3> ref_points;
    std::array<ElementBasis, 3> element;       // degree k traced on the face
    std::array<ElementBasis, 3> element_next;  // degree k+1 traced on the face
    FaceBasis trace;                           // face basis at s
    FaceBasis trace_reversed;                  // face basis at 1-s
  };

  const ElementSet& element() const { return element_; }
  const ElementSet& element_data() const { return element_data_; }
  const FaceSet& face() const { return face_; }
  const FaceSet& face_data() const { return face_data_; }

 private:
  int k_;
  ElementSet element_;
  ElementSet element_data_;
  FaceSet face_;
  FaceSet face_data_;
};

}  // namespace ehdg
