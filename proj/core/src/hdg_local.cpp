#include "ehdg/hdg_local.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ehdg/exceptions.hpp"

namespace ehdg {

namespace {

// Physical gradients of a tabulated basis: rows are basis functions, columns
// quadrature points.
void physical_gradients(const ElementBasis& basis, const Mat2& inv_t, Eigen::MatrixXd& gx,
                        Eigen::MatrixXd& gy) {
  gx = inv_t(0, 0) * basis.grad[0] + inv_t(0, 1) * basis.grad[1];
  gy = inv_t(1, 0) * basis.grad[0] + inv_t(1, 1) * basis.grad[1];
}

const FaceBasis& trace_table(const ReferenceTables::FaceSet& set, bool reversed) {
  return reversed ? set.trace_reversed : set.trace;
}

}  // namespace

CoefficientSamples sample_coefficients(const ElementGeometry& geom, const ReferenceTables& tables,
                                       const SpaceTimeScalar& c, const SpaceTimeVector& beta,
                                       double t) {
  const auto& vol = tables.element();
  const auto& face = tables.face();
  CoefficientSamples s;
  s.c.resize(vol.rule.size());
  s.beta.resize(2, vol.rule.size());
  for (int q = 0; q < vol.rule.size(); ++q) {
    const Vec2 x = geom.map(vol.rule.points[q]);
    s.c[q] = c(x, t);
    s.beta.col(q) = beta(x, t);
  }
  for (int i = 0; i < 3; ++i) {
    s.beta_face[i].resize(2, face.rule.size());
    for (int q = 0; q < face.rule.size(); ++q)
      s.beta_face[i].col(q) = beta(geom.map(face.ref_points[i][q]), t);
  }
  return s;
}

Eigen::MatrixXd LocalBlocks::full() const {
  const LocalLayout L(k);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(L.size(), L.size());
  const int nq = L.q_size(), np = L.np, nt = L.trace_size();
  const int u0 = L.u_offset(), t0 = L.interior_size();
  m.block(0, 0, nq, nq) = A_qq;
  m.block(0, u0, nq, np) = B_qu;
  m.block(0, t0, nq, nt) = C_qt;
  m.block(u0, 0, np, nq) = D_uq;
  m.block(u0, u0, np, np) = M_uu + conv_uu + stab_uu;
  m.block(u0, t0, np, nt) = stab_ut;
  m.block(t0, 0, nt, nq) = flux_tq;
  m.block(t0, u0, nt, np) = flux_tu + stab_tu;
  m.block(t0, t0, nt, nt) = stab_tt;
  return m;
}

LocalBlocks assemble_local_blocks(const ElementGeometry& geom, const ReferenceTables& tables,
                                  const CoefficientSamples& mean, double tau, double dt,
                                  int element) {
  if (!(tau > 0.0)) throw std::invalid_argument("stabilization tau must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  for (int q = 0; q < mean.c.size(); ++q)
    if (!(mean.c[q] > 0.0))
      throw CoefficientError("non-positive ensemble-mean coefficient on element " +
                                 std::to_string(element),
                             element);

  const LocalLayout L(tables.degree());
  const int np = L.np, nf = L.nf;
  const auto& vol = tables.element();
  const auto& face = tables.face();
  const Eigen::MatrixXd& phi = vol.basis.values;
  Eigen::MatrixXd gx, gy;
  physical_gradients(vol.basis, geom.inverse_transpose, gx, gy);

  LocalBlocks b;
  b.k = L.k;
  b.A_qq = Eigen::MatrixXd::Zero(2 * np, 2 * np);
  b.D_uq = Eigen::MatrixXd::Zero(np, 2 * np);
  b.conv_uu = Eigen::MatrixXd::Zero(np, np);

  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(vol.rule.weights.data(), vol.rule.size()) *
                      geom.det;
  // mass weighted by cbar
  const Eigen::MatrixXd phi_c = phi * (w.array() * mean.c.array()).matrix().asDiagonal();
  b.A_qq.topLeftCorner(np, np) = phi_c * phi.transpose();
  b.A_qq.bottomRightCorner(np, np) = b.A_qq.topLeftCorner(np, np);
  const Eigen::MatrixXd phi_w = phi * w.asDiagonal();
  b.D_uq.leftCols(np) = phi_w * gx.transpose();
  b.D_uq.rightCols(np) = phi_w * gy.transpose();
  b.B_qu = -b.D_uq.transpose();
  const Eigen::MatrixXd bgrad =
      gx * mean.beta.row(0).transpose().asDiagonal() + gy * mean.beta.row(1).transpose().asDiagonal();
  b.conv_uu = phi_w * bgrad.transpose();
  b.M_uu = (geom.det / dt) * Eigen::MatrixXd::Identity(np, np);

  const int nt = 3 * nf;
  b.C_qt = Eigen::MatrixXd::Zero(2 * np, nt);
  b.stab_uu = Eigen::MatrixXd::Zero(np, np);
  b.stab_ut = Eigen::MatrixXd::Zero(np, nt);
  b.stab_tt = Eigen::MatrixXd::Zero(nt, nt);
  b.flux_tu = Eigen::MatrixXd::Zero(nt, np);
  for (int i = 0; i < 3; ++i) {
    const Eigen::MatrixXd& fphi = face.element[i].values;  // np x nqf
    const Eigen::MatrixXd& psi = trace_table(face, geom.reversed[i]).values;  // nf x nqf
    const Eigen::VectorXd wf =
        Eigen::Map<const Eigen::VectorXd>(face.rule.weights.data(), face.rule.size()) *
        geom.lengths[i];
    const Vec2 n = geom.normals[i];
    const Eigen::MatrixXd phi_psi = fphi * wf.asDiagonal() * psi.transpose();  // np x nf
    b.C_qt.block(0, i * nf, np, nf) = n.x() * phi_psi;
    b.C_qt.block(np, i * nf, np, nf) = n.y() * phi_psi;
    b.stab_uu += tau * (fphi * wf.asDiagonal() * fphi.transpose());
    b.stab_ut.block(0, i * nf, np, nf) = -tau * phi_psi;
    b.stab_tt.block(i * nf, i * nf, nf, nf) = tau * (psi * wf.asDiagonal() * psi.transpose());
    const Eigen::VectorXd bn = n.transpose() * mean.beta_face[i];
    b.flux_tu.block(i * nf, 0, nf, np) =
        -(psi * (wf.array() * bn.array()).matrix().asDiagonal() * fphi.transpose());
  }
  b.flux_tq = -b.C_qt.transpose();
  b.stab_tu = b.stab_ut.transpose();
  return b;
}

Eigen::MatrixXd CondensedElement::trace_rhs(const Eigen::MatrixXd& local_rhs) const {
  const int ni = interior_size();
  return local_rhs.bottomRows(local_rhs.rows() - ni) - reduce * local_rhs.topRows(ni);
}

Eigen::MatrixXd CondensedElement::recover_interior(const Eigen::MatrixXd& trace,
                                                   const Eigen::MatrixXd& local_rhs) const {
  const int ni = interior_size();
  return interior_inverse * local_rhs.topRows(ni) - lift * trace;
}

CondensedElement condense(const Eigen::MatrixXd& local, int n_interior, int element) {
  const int nt = static_cast<int>(local.rows()) - n_interior;
  const auto A_ii = local.topLeftCorner(n_interior, n_interior);
  const auto A_it = local.topRightCorner(n_interior, nt);
  const auto A_ti = local.bottomLeftCorner(nt, n_interior);
  const auto A_tt = local.bottomRightCorner(nt, nt);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A_ii);
  // the rcond estimate alone misses exact zero pivots
  const Eigen::VectorXd piv = lu.matrixLU().diagonal().cwiseAbs();
  const double rc = n_interior == 0 ? 1.0 : std::min(lu.rcond(), piv.minCoeff() / piv.maxCoeff());
  if (!(rc > 1e-14))
    throw SingularLocalSystem("singular interior block on element " + std::to_string(element) +
                                  " (rcond " + std::to_string(rc) + ")",
                              element);
  CondensedElement c;
  c.interior_inverse = lu.inverse();
  c.lift = c.interior_inverse * A_it;
  c.reduce = A_ti * c.interior_inverse;
  c.schur = A_tt - A_ti * c.lift;
  return c;
}

CondensedElement condense(const LocalBlocks& blocks, int element) {
  const LocalLayout L(blocks.k);
  return condense(blocks.full(), L.interior_size(), element);
}

LocalData sample_data(const ElementGeometry& geom, const ReferenceTables& tables,
                      const SpaceTimeScalar& f, const SpaceTimeScalar& g, double t) {
  const auto& vol = tables.element_data();
  const auto& face = tables.face_data();
  LocalData d;
  d.f.resize(vol.rule.size());
  for (int q = 0; q < vol.rule.size(); ++q) d.f[q] = f(geom.map(vol.rule.points[q]), t);
  for (int i = 0; i < 3; ++i) {
    if (!geom.boundary[i]) continue;
    d.g[i].resize(face.rule.size());
    for (int q = 0; q < face.rule.size(); ++q) d.g[i][q] = g(geom.map(face.ref_points[i][q]), t);
  }
  return d;
}

Eigen::VectorXd local_rhs(const ElementGeometry& geom, const ReferenceTables& tables,
                          const CoefficientSamples& mean, const CoefficientSamples& member,
                          const LocalData& data, const Eigen::VectorXd& q_prev,
                          const Eigen::VectorXd& u_prev, int u_prev_degree, double tau,
                          double dt) {
  const LocalLayout L(tables.degree());
  const int np = L.np, nf = L.nf;
  if (u_prev_degree != L.k && u_prev_degree != L.k + 1)
    throw std::invalid_argument("previous u must have degree k or k+1");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(L.size());
  auto rq = rhs.segment(0, 2 * np);
  auto ru = rhs.segment(L.u_offset(), np);

  // (f, v)
  {
    const auto& vol = tables.element_data();
    for (int q = 0; q < vol.rule.size(); ++q)
      ru += (vol.rule.weights[q] * geom.det * data.f[q]) * vol.basis.values.col(q);
  }
  // (1/dt)(u_prev, v): hierarchical orthonormal basis, so only the leading
  // np coefficients contribute.
  ru += (geom.det / dt) * u_prev.head(np);

  // boundary data
  {
    const auto& face = tables.face_data();
    for (int i = 0; i < 3; ++i) {
      if (!geom.boundary[i]) continue;
      const Vec2 n = geom.normals[i];
      for (int q = 0; q < face.rule.size(); ++q) {
        const double wg = face.rule.weights[q] * geom.lengths[i] * data.g[i][q];
        const auto phi = face.element[i].values.col(q);
        rq.head(np) -= (wg * n.x()) * phi;
        rq.tail(np) -= (wg * n.y()) * phi;
        ru += (tau * wg) * phi;
      }
    }
  }

  // lag terms vanish identically when the member coincides with the mean
  if (&member == &mean) return rhs;

  const auto& vol = tables.element();
  const auto& face = tables.face();
  const ElementBasis& ub = u_prev_degree == L.k ? vol.basis : vol.basis_next;
  Eigen::MatrixXd gx, gy;
  physical_gradients(ub, geom.inverse_transpose, gx, gy);
  const Eigen::RowVectorXd dux = u_prev.transpose() * gx;  // grad u_prev at points
  const Eigen::RowVectorXd duy = u_prev.transpose() * gy;
  const Eigen::RowVectorXd qx = q_prev.head(np).transpose() * vol.basis.values;
  const Eigen::RowVectorXd qy = q_prev.tail(np).transpose() * vol.basis.values;
  for (int q = 0; q < vol.rule.size(); ++q) {
    const double w = vol.rule.weights[q] * geom.det;
    const double dc = mean.c[q] - member.c[q];
    const Vec2 db = mean.beta.col(q) - member.beta.col(q);
    const auto phi = vol.basis.values.col(q);
    rq.head(np) += (w * dc * qx[q]) * phi;
    rq.tail(np) += (w * dc * qy[q]) * phi;
    ru += (w * (db.x() * dux[q] + db.y() * duy[q])) * phi;
  }
  for (int i = 0; i < 3; ++i) {
    if (geom.boundary[i]) continue;
    const Vec2 n = geom.normals[i];
    const ElementBasis& ftab = u_prev_degree == L.k ? face.element[i] : face.element_next[i];
    const Eigen::MatrixXd& psi = trace_table(face, geom.reversed[i]).values;
    auto rt = rhs.segment(L.trace_offset(i), nf);
    for (int q = 0; q < face.rule.size(); ++q) {
      const double dbn = n.dot(mean.beta_face[i].col(q) - member.beta_face[i].col(q));
      const double uval = u_prev.dot(ftab.values.col(q));
      rt -= (face.rule.weights[q] * geom.lengths[i] * dbn * uval) * psi.col(q);
    }
  }
  return rhs;
}

Eigen::MatrixXd lag_operator(const ElementGeometry& geom, const ReferenceTables& tables,
                             const CoefficientSamples& mean, const CoefficientSamples& member) {
  const LocalLayout L(tables.degree());
  const int np = L.np, nf = L.nf;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(L.size(), 3 * np);
  if (&member == &mean) return M;
  const auto& vol = tables.element();
  const auto& face = tables.face();
  Eigen::MatrixXd gx, gy;
  physical_gradients(vol.basis, geom.inverse_transpose, gx, gy);
  Eigen::MatrixXd cq = Eigen::MatrixXd::Zero(np, np);
  for (int q = 0; q < vol.rule.size(); ++q) {
    const double w = vol.rule.weights[q] * geom.det;
    const Vec2 db = mean.beta.col(q) - member.beta.col(q);
    const auto phi = vol.basis.values.col(q);
    cq.noalias() += (w * (mean.c[q] - member.c[q])) * phi * phi.transpose();
    M.block(L.u_offset(), 2 * np, np, np).noalias() +=
        w * phi * (db.x() * gx.col(q) + db.y() * gy.col(q)).transpose();
  }
  M.block(0, 0, np, np) = cq;
  M.block(np, np, np, np) = cq;
  for (int i = 0; i < 3; ++i) {
    if (geom.boundary[i]) continue;
    const Vec2 n = geom.normals[i];
    const Eigen::MatrixXd& psi = trace_table(face, geom.reversed[i]).values;
    const auto& phi = face.element[i].values;
    auto rt = M.block(L.trace_offset(i), 2 * np, nf, np);
    for (int q = 0; q < face.rule.size(); ++q) {
      const double dbn = n.dot(mean.beta_face[i].col(q) - member.beta_face[i].col(q));
      rt.noalias() -= (face.rule.weights[q] * geom.lengths[i] * dbn) * psi.col(q) * phi.col(q).transpose();
    }
  }
  return M;
}

}  // namespace ehdg
