#pragma once

// Element-local pieces of the ensemble HDG scheme.
//
// Local unknown order is [q_x, q_y, u, uhat_0, uhat_1, uhat_2]; q and u use
// the degree-k element basis, uhat_i the face basis on local face i
// parameterized along the global face orientation. The test functions
// (r, v, vhat) follow the same order, so row blocks are
//
//   r   : (cbar q, r) - (u, div r) + <uhat, r.n>
//   v   : (1/dt)(u, v) + (div q, v) + (betabar.grad u, v) + <tau(u - uhat), v>
//   vhat: -<q.n, vhat> - <betabar.n u, vhat> - <tau(u - uhat), vhat>
//
// Trace unknowns on boundary faces are present in the local blocks but are
// never part of the global system (the trace space vanishes on the boundary);
// callers drop those rows and columns.

#include <array>

#include <Eigen/Core>

#include "ehdg/mesh.hpp"
#include "ehdg/polybasis.hpp"
#include "ehdg/types.hpp"

namespace ehdg {

struct LocalLayout {
  int k = 0;
  int np = 1;  // element_dim(k)
  int nf = 1;  // face_dim(k)

  explicit LocalLayout(int degree)
      : k(degree), np(element_dim(degree)), nf(face_dim(degree)) {}

  int q_size() const { return 2 * np; }
  int interior_size() const { return 3 * np; }
  int trace_size() const { return 3 * nf; }
  int size() const { return interior_size() + trace_size(); }
  int u_offset() const { return 2 * np; }
  int trace_offset(int local_face) const { return interior_size() + local_face * nf; }
};

/// Pointwise samples of a (c, beta) pair on one element at the tables'
/// element rule and face rule points.
struct CoefficientSamples {
  Eigen::VectorXd c;
  Eigen::Matrix2Xd beta;
  std::array<Eigen::Matrix2Xd, 3> beta_face;
};

CoefficientSamples sample_coefficients(const ElementGeometry& geom, const ReferenceTables& tables,
                                       const SpaceTimeScalar& c, const SpaceTimeVector& beta,
                                       double t);

struct LocalBlocks {
  int k = 0;
  Eigen::MatrixXd A_qq;     // (cbar q, r)
  Eigen::MatrixXd B_qu;     // -(u, div r)
  Eigen::MatrixXd C_qt;     // <uhat, r.n>
  Eigen::MatrixXd D_uq;     // (div q, v)
  Eigen::MatrixXd M_uu;     // (1/dt)(u, v)
  Eigen::MatrixXd conv_uu;  // (betabar.grad u, v)
  Eigen::MatrixXd stab_uu;  // <tau u, v>
  Eigen::MatrixXd stab_ut;  // -<tau uhat, v>
  Eigen::MatrixXd stab_tu;  // -<tau u, vhat>
  Eigen::MatrixXd stab_tt;  // <tau uhat, vhat>
  Eigen::MatrixXd flux_tq;  // -<q.n, vhat>
  Eigen::MatrixXd flux_tu;  // -<betabar.n u, vhat>

  /// The assembled local matrix in the layout order.
  Eigen::MatrixXd full() const;
};

/// Throws CoefficientError when a cbar sample is not positive, std::invalid_argument
/// for non-positive tau or dt.
LocalBlocks assemble_local_blocks(const ElementGeometry& geom, const ReferenceTables& tables,
                                  const CoefficientSamples& mean, double tau, double dt,
                                  int element = -1);

/// Static condensation of one element: interior (q, u) eliminated in favour of
/// the three face traces.
struct CondensedElement {
  Eigen::MatrixXd schur;             // A_tt - A_ti A_ii^{-1} A_it
  Eigen::MatrixXd interior_inverse;  // A_ii^{-1}
  Eigen::MatrixXd lift;              // A_ii^{-1} A_it
  Eigen::MatrixXd reduce;            // A_ti A_ii^{-1}

  int interior_size() const { return static_cast<int>(interior_inverse.rows()); }
  int trace_size() const { return static_cast<int>(schur.rows()); }

  /// Trace right-hand side b_t - A_ti A_ii^{-1} b_i, one column per member.
  Eigen::MatrixXd trace_rhs(const Eigen::MatrixXd& local_rhs) const;
  /// Interior unknowns A_ii^{-1} (b_i - A_it uhat).
  Eigen::MatrixXd recover_interior(const Eigen::MatrixXd& trace,
                                   const Eigen::MatrixXd& local_rhs) const;
};

CondensedElement condense(const LocalBlocks& blocks, int element = -1);
/// Same on an explicit matrix whose first n_interior unknowns are eliminated.
/// Throws SingularLocalSystem if the interior block is numerically singular.
CondensedElement condense(const Eigen::MatrixXd& local, int n_interior, int element = -1);

/// Data of one member sampled on one element: f at the element data-rule
/// points, g at the face data-rule points (read on boundary faces only).
struct LocalData {
  Eigen::VectorXd f;
  std::array<Eigen::VectorXd, 3> g;
};

LocalData sample_data(const ElementGeometry& geom, const ReferenceTables& tables,
                      const SpaceTimeScalar& f, const SpaceTimeScalar& g, double t);

/// Right-hand side of one member on one element, in the layout order.
///
///   r   : ((cbar - c_j) q_prev, r) - <g, r.n>_boundary
///   v   : (f, v) + (1/dt)(u_prev, v) + <tau g, v>_boundary
///         + ((betabar - beta_j).grad u_prev, v)
///   vhat: -<(betabar - beta_j).n u_prev, vhat>     (interior faces)
///
/// q_prev has degree k; u_prev has degree k or k+1 (the initial state).
Eigen::VectorXd local_rhs(const ElementGeometry& geom, const ReferenceTables& tables,
                          const CoefficientSamples& mean, const CoefficientSamples& member,
                          const LocalData& data, const Eigen::VectorXd& q_prev,
                          const Eigen::VectorXd& u_prev, int u_prev_degree, double tau,
                          double dt);

/// The lag terms of local_rhs as a matrix acting on [q_prev; u_prev], for
/// u_prev of degree k. Zero when member is mean.
Eigen::MatrixXd lag_operator(const ElementGeometry& geom, const ReferenceTables& tables,
                             const CoefficientSamples& mean, const CoefficientSamples& member);

}  // namespace ehdg
