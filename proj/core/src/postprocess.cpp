#include "ehdg/postprocess.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/LU>

#include "ehdg/exceptions.hpp"

namespace ehdg {

namespace {

struct BorderedSystem {
  Eigen::MatrixXd kkt;    // [K m; m^T 0]
  Eigen::MatrixXd g;      // -(c psi e_d, grad phi_a), np1 x 2np
  double mean_weight = 0; // (phi_0, 1)_K, shared by the degree-k and k+1 bases
};

BorderedSystem build(const Eigen::VectorXd& c, const TriangleRule& rule,
                     const ElementBasis& low, const ElementBasis& high,
                     const ElementGeometry& geom) {
  const int np = low.dim;
  const int np1 = high.dim;
  BorderedSystem s;
  s.kkt = Eigen::MatrixXd::Zero(np1 + 1, np1 + 1);
  s.g = Eigen::MatrixXd::Zero(np1, 2 * np);
  Eigen::MatrixXd gx(np1, rule.size()), gy(np1, rule.size());
  const Mat2& it = geom.inverse_transpose;
  gx = it(0, 0) * high.grad[0] + it(0, 1) * high.grad[1];
  gy = it(1, 0) * high.grad[0] + it(1, 1) * high.grad[1];
  for (int q = 0; q < rule.size(); ++q) {
    const double w = rule.weights[q] * geom.det;
    s.kkt.topLeftCorner(np1, np1).noalias() +=
        w * (gx.col(q) * gx.col(q).transpose() + gy.col(q) * gy.col(q).transpose());
    s.kkt.col(np1).head(np1) += w * high.values.col(q);
    s.g.leftCols(np).noalias() -= (w * c[q]) * gx.col(q) * low.values.col(q).transpose();
    s.g.rightCols(np).noalias() -= (w * c[q]) * gy.col(q) * low.values.col(q).transpose();
  }
  s.kkt.row(np1).head(np1) = s.kkt.col(np1).head(np1).transpose();
  s.mean_weight = s.kkt(0, np1);
  return s;
}

Eigen::MatrixXd invert(const Eigen::MatrixXd& kkt, int element) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible())
    throw SingularLocalSystem("postprocessing system is singular", element);
  return lu.inverse();
}

}  // namespace

Eigen::VectorXd postprocess_element(const Eigen::VectorXd& q_h, const Eigen::VectorXd& u_h,
                                    const Eigen::VectorXd& c, const TriangleRule& rule,
                                    const ElementGeometry& geom, int k, int element) {
  if (k < 0) throw std::invalid_argument("postprocess_element: negative degree");
  const int np = element_dim(k);
  if (q_h.size() != 2 * np || u_h.size() < np || c.size() != rule.size())
    throw std::invalid_argument("postprocess_element: coefficient sizes do not match degree " +
                                std::to_string(k));
  const ElementBasis low = eval_element_basis(k, rule.points);
  const ElementBasis high = eval_element_basis(k + 1, rule.points);
  const BorderedSystem s = build(c, rule, low, high, geom);
  const int np1 = high.dim;
  Eigen::VectorXd rhs(np1 + 1);
  rhs.head(np1) = s.g * q_h;
  rhs[np1] = s.mean_weight * u_h[0];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s.kkt);
  if (!lu.isInvertible()) throw SingularLocalSystem("postprocessing system is singular", element);
  return lu.solve(rhs).head(np1);
}

Postprocessor::Postprocessor(const Mesh& mesh, int k, const ScalarField& c) : k_(k) {
  if (k < 0) throw std::invalid_argument("Postprocessor: negative degree");
  const TriangleRule rule = triangle_quadrature(2 * k + 4);
  const ElementBasis low = eval_element_basis(k, rule.points);
  const ElementBasis high = eval_element_basis(k + 1, rule.points);
  const int np1 = high.dim;
  from_q_.reserve(mesh.num_elements());
  from_u_.reserve(mesh.num_elements());
  Eigen::VectorXd cs(rule.size());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    for (int q = 0; q < rule.size(); ++q) cs[q] = c(g.map(rule.points[q]));
    const BorderedSystem s = build(cs, rule, low, high, g);
    const Eigen::MatrixXd inv = invert(s.kkt, e);
    from_q_.push_back(inv.topLeftCorner(np1, np1) * s.g);
    from_u_.push_back(inv.col(np1).head(np1) * s.mean_weight);
  }
}

Eigen::VectorXd Postprocessor::apply_element(int element, const Eigen::VectorXd& q_h,
                                             const Eigen::VectorXd& u_h) const {
  return from_q_[element] * q_h + from_u_[element] * u_h[0];
}

ProjectedField Postprocessor::apply(const ProjectedField& q, const ProjectedField& u) const {
  if (q.degree != k_ || q.components != 2 || u.components != 1)
    throw std::invalid_argument("Postprocessor::apply: field layout does not match degree");
  ProjectedField out;
  out.degree = k_ + 1;
  out.components = 1;
  out.coeffs.resize(element_dim(k_ + 1), q.coeffs.cols());
  for (Eigen::Index e = 0; e < q.coeffs.cols(); ++e)
    out.coeffs.col(e).noalias() =
        from_q_[e] * q.coeffs.col(e) + from_u_[e] * u.coeffs(0, e);
  return out;
}

}  // namespace ehdg
