#include "ehdg/projections.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "ehdg/polybasis.hpp"

namespace ehdg {

int ProjectedField::dim() const { return element_dim(degree); }

double ProjectedField::value(const Mesh&, int element, const Vec2& ref, int component) const {
  const int n = dim();
  return coeffs.col(element).segment(component * n, n).dot(element_basis_at(degree, ref));
}

ProjectedField zero_field(const Mesh& mesh, int degree, int components) {
  ProjectedField f;
  f.degree = degree;
  f.components = components;
  f.coeffs = Eigen::MatrixXd::Zero(components * element_dim(degree), mesh.num_elements());
  return f;
}

namespace {

template <int Components, class Eval>
ProjectedField project(const Eval& eval, const Mesh& mesh, int degree) {
  const TriangleRule rule = triangle_quadrature(2 * degree + 4);
  const ElementBasis basis = eval_element_basis(degree, rule.points);
  ProjectedField out = zero_field(mesh, degree, Components);
  const int n = basis.dim;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = g.map(rule.points[q]);
      const double w = rule.weights[q];  // orthonormal basis: divide by det cancels the Jacobian
      if constexpr (Components == 1) {
        out.coeffs.col(e).head(n) += w * eval(x) * basis.values.col(q);
      } else {
        const Vec2 v = eval(x);
        out.coeffs.col(e).segment(0, n) += w * v.x() * basis.values.col(q);
        out.coeffs.col(e).segment(n, n) += w * v.y() * basis.values.col(q);
      }
    }
  }
  return out;
}

template <int Components, class Eval>
double error(const ProjectedField& field, const Eval& eval, const Mesh& mesh, int order) {
  if (order < 0) order = 2 * field.degree + 4;
  const TriangleRule rule = triangle_quadrature(order);
  const ElementBasis basis = eval_element_basis(field.degree, rule.points);
  const int n = basis.dim;
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    double local = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const Vec2 x = g.map(rule.points[q]);
      if constexpr (Components == 1) {
        const double d = eval(x) - field.coeffs.col(e).head(n).dot(basis.values.col(q));
        local += rule.weights[q] * d * d;
      } else {
        const Vec2 v = eval(x);
        const double dx = v.x() - field.coeffs.col(e).segment(0, n).dot(basis.values.col(q));
        const double dy = v.y() - field.coeffs.col(e).segment(n, n).dot(basis.values.col(q));
        local += rule.weights[q] * (dx * dx + dy * dy);
      }
    }
    sum += local * g.det;
  }
  return std::sqrt(sum);
}

}  // namespace

ProjectedField l2_project_element(const ScalarField& f, const Mesh& mesh, int degree) {
  return project<1>(f, mesh, degree);
}

ProjectedField l2_project_element(const VectorField& f, const Mesh& mesh, int degree) {
  return project<2>(f, mesh, degree);
}

double l2_error(const ProjectedField& field, const ScalarField& f, const Mesh& mesh, int order) {
  if (field.components != 1) throw std::invalid_argument("l2_error: scalar field expected");
  return error<1>(field, f, mesh, order);
}

double l2_error(const ProjectedField& field, const VectorField& f, const Mesh& mesh, int order) {
  if (field.components != 2) throw std::invalid_argument("l2_error: vector field expected");
  return error<2>(field, f, mesh, order);
}

double l2_norm(const ProjectedField& field, const Mesh& mesh) {
  // Orthonormal basis: ||p||_K^2 = det * |coeffs|^2.
  double sum = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    sum += 2.0 * mesh.element_area(e) * field.coeffs.col(e).squaredNorm();
  return std::sqrt(sum);
}

FaceField l2_project_face(const ScalarField& f, const Mesh& mesh, int degree) {
  const EdgeRule rule = edge_quadrature(2 * degree + 4);
  const FaceBasis basis = eval_face_basis(degree, rule.points);
  FaceField out;
  out.degree = degree;
  out.coeffs = Eigen::MatrixXd::Zero(basis.dim, mesh.num_faces());
  for (int fc = 0; fc < mesh.num_faces(); ++fc) {
    const Vec2& a = mesh.vertices()[mesh.faces()[fc][0]];
    const Vec2& b = mesh.vertices()[mesh.faces()[fc][1]];
    for (int q = 0; q < rule.size(); ++q)
      out.coeffs.col(fc) += rule.weights[q] * f(a + rule.points[q] * (b - a)) * basis.values.col(q);
  }
  return out;
}

double face_l2_error(const FaceField& field, const ScalarField& f, const Mesh& mesh, int order) {
  if (order < 0) order = 2 * field.degree + 4;
  const EdgeRule rule = edge_quadrature(order);
  const FaceBasis basis = eval_face_basis(field.degree, rule.points);
  double sum = 0.0;
  for (int fc = 0; fc < mesh.num_faces(); ++fc) {
    const Vec2& a = mesh.vertices()[mesh.faces()[fc][0]];
    const Vec2& b = mesh.vertices()[mesh.faces()[fc][1]];
    double local = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const double d = f(a + rule.points[q] * (b - a)) - field.coeffs.col(fc).dot(basis.values.col(q));
      local += rule.weights[q] * d * d;
    }
    // each face belongs to the boundary of one or two elements
    sum += local * mesh.face_length(fc) * (mesh.is_boundary_face(fc) ? 1.0 : 2.0);
  }
  return std::sqrt(sum);
}

HdgProjection hdg_project(const VectorField& q, const ScalarField& u, const Mesh& mesh,
                          const VectorField& beta, const std::vector<double>& tau, int k) {
  if (static_cast<int>(tau.size()) != mesh.num_elements())
    throw std::invalid_argument("hdg_project: one tau value per element required");
  const ReferenceTables tables(k);
  const auto& vol = tables.element_data();
  const auto& face = tables.face_data();
  const int np = element_dim(k);
  const int nlow = k == 0 ? 0 : element_dim(k - 1);
  const int nf = face_dim(k);
  const int n = 3 * np;  // unknowns: qx, qy, u

  HdgProjection out{zero_field(mesh, k, 2), zero_field(mesh, k, 1)};
  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd rhs(n);

  for (int e = 0; e < mesh.num_elements(); ++e) {
    if (!(tau[e] > 0.0))
      throw std::invalid_argument("hdg_project: tau must be positive on element " +
                                  std::to_string(e));
    const ElementGeometry g = element_geometry(mesh, e);
    A.setZero();
    rhs.setZero();
    int row = 0;

    // (Pq + beta Pu, r) for r in [P^{k-1}]^2
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < nlow; ++i, ++row) {
        A(row, c * np + i) = g.det;
        for (int qp = 0; qp < vol.rule.size(); ++qp) {
          const Vec2 x = g.map(vol.rule.points[qp]);
          const double w = vol.rule.weights[qp] * g.det;
          const Vec2 b = beta(x);
          const Vec2 qv = q(x);
          const double phi_i = vol.basis.values(i, qp);
          A.row(row).segment(2 * np, np) += w * b[c] * phi_i * vol.basis.values.col(qp).transpose();
          rhs[row] += w * (qv[c] + b[c] * u(x)) * phi_i;
        }
      }
    }
    // (Pu, w) for w in P^{k-1}
    for (int i = 0; i < nlow; ++i, ++row) {
      A(row, 2 * np + i) = g.det;
      for (int qp = 0; qp < vol.rule.size(); ++qp)
        rhs[row] += vol.rule.weights[qp] * g.det * u(g.map(vol.rule.points[qp])) *
                    vol.basis.values(i, qp);
    }
    // face moments
    for (int lf = 0; lf < 3; ++lf) {
      const Vec2 nrm = g.normals[lf];
      for (int m = 0; m < nf; ++m, ++row) {
        for (int qp = 0; qp < face.rule.size(); ++qp) {
          const Vec2 x = g.map(face.ref_points[lf][qp]);
          const double w = face.rule.weights[qp] * g.lengths[lf];
          const double mu = face.trace.values(m, qp);
          const Vec2 b = beta(x);
          const auto phi = face.element[lf].values.col(qp);
          A.row(row).segment(0, np) += w * nrm.x() * mu * phi.transpose();
          A.row(row).segment(np, np) += w * nrm.y() * mu * phi.transpose();
          A.row(row).segment(2 * np, np) += w * (b.dot(nrm) + tau[e]) * mu * phi.transpose();
          const double uu = u(x);
          rhs[row] += w * (q(x).dot(nrm) + b.dot(nrm) * uu + tau[e] * uu) * mu;
        }
      }
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
      throw std::runtime_error("hdg_project: singular local system on element " +
                               std::to_string(e));
    const Eigen::VectorXd x = lu.solve(rhs);
    out.q.coeffs.col(e) = x.head(2 * np);
    out.u.coeffs.col(e) = x.tail(np);
  }
  return out;
}

}  // namespace ehdg
