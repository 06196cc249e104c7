#pragma once

// Element-by-element reconstruction u* in P^{k+1}(K) from (q_h, u_h):
//
//   (grad u*, grad z)_K = -(c q_h, grad z)_K   for z in P^{k+1}(K), (z, 1)_K = 0
//   (u*, 1)_K           = (u_h, 1)_K
//
// solved as a bordered system with one multiplier for the mean.

#include <vector>

#include <Eigen/Core>

#include "ehdg/mesh.hpp"
#include "ehdg/polybasis.hpp"
#include "ehdg/projections.hpp"
#include "ehdg/types.hpp"

namespace ehdg {

/// q_h holds 2*element_dim(k) coefficients, u_h at least element_dim(k) (only
/// the mean is read). c holds samples at the element quadrature rule `rule`.
/// Returns element_dim(k+1) coefficients. Throws SingularLocalSystem if the
/// bordered system is singular.
Eigen::VectorXd postprocess_element(const Eigen::VectorXd& q_h, const Eigen::VectorXd& u_h,
                                    const Eigen::VectorXd& c, const TriangleRule& rule,
                                    const ElementGeometry& geom, int k, int element = -1);

/// Per-element linear maps u* = P_q q_h + P_u u_h, built once for a fixed
/// coefficient c and reused for every time level.
class Postprocessor {
 public:
  Postprocessor(const Mesh& mesh, int k, const ScalarField& c);

  int degree() const { return k_; }

  /// Field of degree k+1.
  ProjectedField apply(const ProjectedField& q, const ProjectedField& u) const;
  Eigen::VectorXd apply_element(int element, const Eigen::VectorXd& q_h,
                                const Eigen::VectorXd& u_h) const;

 private:
  int k_;
  std::vector<Eigen::MatrixXd> from_q_;  // np1 x 2np
  std::vector<Eigen::VectorXd> from_u_;  // coefficient of the mean mode
};

}  // namespace ehdg
