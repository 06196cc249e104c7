#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ehdg/mesh.hpp"
#include "ehdg/types.hpp"

namespace ehdg {

/// Piecewise polynomial field in the orthonormal element basis.
///
/// coeffs has components * element_dim(degree) rows (component-major) and one
/// column per element.
struct ProjectedField {
  int degree = 0;
  int components = 1;
  Eigen::MatrixXd coeffs;

  int dim() const;
  double value(const Mesh& mesh, int element, const Vec2& ref, int component = 0) const;
};

/// Piecewise polynomial on faces in the orthonormal Legendre face basis,
/// parameterized along each face's stored orientation. One column per face.
struct FaceField {
  int degree = 0;
  Eigen::MatrixXd coeffs;
};

ProjectedField zero_field(const Mesh& mesh, int degree, int components = 1);

/// Element-wise L2 projection onto P^degree.
ProjectedField l2_project_element(const ScalarField& f, const Mesh& mesh, int degree);
ProjectedField l2_project_element(const VectorField& f, const Mesh& mesh, int degree);

/// Face-wise L2 projection onto P^degree(e).
FaceField l2_project_face(const ScalarField& f, const Mesh& mesh, int degree);

/// ||f - field|| over the mesh, quadrature order 2*degree+4 unless given.
double l2_error(const ProjectedField& field, const ScalarField& f, const Mesh& mesh,
                int order = -1);
double l2_error(const ProjectedField& field, const VectorField& f, const Mesh& mesh,
                int order = -1);
double l2_norm(const ProjectedField& field, const Mesh& mesh);

/// (sum over elements of ||f - P_M f||^2_{dK})^{1/2}.
double face_l2_error(const FaceField& field, const ScalarField& f, const Mesh& mesh,
                     int order = -1);

struct HdgProjection {
  ProjectedField q;  // 2 components, degree k
  ProjectedField u;  // degree k
};

/// Projection defined element-wise by the moment conditions
///   (Pq + beta Pu, r)_K = (q + beta u, r)_K        r in [P^{k-1}]^2
///   (Pu, w)_K = (u, w)_K                            w in P^{k-1}
///   <Pq.n + beta.n Pu + tau Pu, mu>_e = <q.n + beta.n u + tau u, mu>_e
///                                                    mu in P^k(e), e in dK.
/// tau holds one positive value per element. Throws std::runtime_error naming
/// the element if a local system is singular.
HdgProjection hdg_project(const VectorField& q, const ScalarField& u, const Mesh& mesh,
                          const VectorField& beta, const std::vector<double>& tau, int k);

}  // namespace ehdg
