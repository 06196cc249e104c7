#pragma once

// Plain implicit HDG time stepping for one problem, with its own right-hand
// side assembly and global solve. No ensemble terms of any kind.

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseLU>

#include "ehdg/ensemble_solver.hpp"

namespace oracle {

class SingleHdg {
 public:
  SingleHdg(const ehdg::Mesh& mesh, const ehdg::Member& member, int k, double dt, double tau);

  /// Advances (q, u) in the library's element basis; u may have degree k or k+1.
  void step(ehdg::ProjectedField& q, ehdg::ProjectedField& u, Eigen::VectorXd& trace);

 private:
  const ehdg::Mesh& mesh_;
  const ehdg::Member& member_;
  int k_;
  double dt_, tau_;
  int n_ = 0;
  ehdg::ReferenceTables tables_;
  std::vector<ehdg::ElementGeometry> geom_;
  std::vector<ehdg::CondensedElement> cond_;
  std::vector<int> face_offset_;
  int size_ = 0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

}  // namespace oracle
