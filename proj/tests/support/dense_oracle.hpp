#pragma once

// Monolithic dense reference for the ensemble scheme: every element unknown
// and every interior-face trace unknown in one system, physical-coordinate
// monomial bases, no static condensation.

#include <map>
#include <vector>

#include <Eigen/Core>

#include "ehdg/ensemble_solver.hpp"
#include "ehdg/mesh.hpp"
#include "oracle_quadrature.hpp"

namespace oracle {

class DenseEnsembleOracle {
 public:
  /// lag_terms = false drops every term that carries a member deviation,
  /// giving the plain implicit HDG step of each member with the mean
  /// coefficients (identical to the member's own when J = 1).
  DenseEnsembleOracle(const ehdg::Mesh& mesh, const ehdg::ProblemSpec& spec, int k, double dt,
                      double tau, bool lag_terms = true);

  void step();
  int steps() const { return n_; }

  double u(int member, int element, const Vec2& x) const;
  Vec2 q(int member, int element, const Vec2& x) const;
  /// Trace at a point on face (a, b) given by its vertex indices; 0 on the boundary.
  double trace(int member, int va, int vb, const Vec2& x) const;

 private:
  struct Face {
    int a, b;  // vertex indices, a < b
    std::vector<int> elements;
    int offset = -1;  // -1 on the boundary
  };
  double face_param(const Face& f, const Vec2& x) const;

  const ehdg::Mesh& mesh_;
  const ehdg::ProblemSpec& spec_;
  int k_;
  double dt_, tau_;
  bool lag_;
  int n_ = 0;
  int np_, nf_, order_;
  std::vector<MonomialSpace> space_, space_next_;
  std::vector<Face> faces_;
  std::map<std::pair<int, int>, int> face_index_;
  std::vector<std::array<int, 3>> element_faces_;
  int size_ = 0;
  // per member: element coefficients (q_x, q_y in space_, u in space_ or space_next_)
  std::vector<Eigen::MatrixXd> qc_, uc_;
  std::vector<Eigen::VectorXd> trace_;
  bool u_next_ = true;  // u is in the degree-(k+1) space (initial state)
};

}  // namespace oracle
