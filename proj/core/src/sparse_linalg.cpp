#include "ehdg/sparse_linalg.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>
#include <unsupported/Eigen/SparseExtra>

#include "ehdg/exceptions.hpp"
#include "ehdg/polybasis.hpp"

namespace ehdg {

TraceDofMap::TraceDofMap(const Mesh& mesh, int k) : k_(k), nf_(face_dim(k)) {
  offset_.assign(mesh.num_faces(), -1);
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.is_boundary_face(f)) continue;
    offset_[f] = size_;
    size_ += nf_;
  }
}

std::vector<int> TraceDofMap::element_dofs(const Mesh& mesh, int element) const {
  std::vector<int> dofs(3 * nf_, -1);
  for (int i = 0; i < 3; ++i) {
    const int off = offset_[mesh.element_face(element, i)];
    if (off < 0) continue;
    for (int m = 0; m < nf_; ++m) dofs[i * nf_ + m] = off + m;
  }
  return dofs;
}

FingerprintBuilder& FingerprintBuilder::add(std::span<const double> values) {
  for (double v : values) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    add(bits);
  }
  return *this;
}

FingerprintBuilder& FingerprintBuilder::add(std::uint64_t v) {
  for (int byte = 0; byte < 8; ++byte) {
    hash_ ^= (v >> (8 * byte)) & 0xffu;
    hash_ *= 1099511628211ull;
  }
  return *this;
}

TraceSystem assemble_trace_matrix(const Mesh& mesh, const TraceDofMap& dofs,
                                  std::span<const CondensedElement> elements,
                                  Fingerprint fingerprint) {
  if (static_cast<int>(elements.size()) != mesh.num_elements())
    throw std::invalid_argument("assemble_trace_matrix: one condensed element per mesh element");
  const int nt = 3 * dofs.modes();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.num_elements()) * nt * nt);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto& S = elements[e].schur;
    if (S.rows() != nt || S.cols() != nt)
      throw std::invalid_argument("assemble_trace_matrix: Schur block of element " +
                                  std::to_string(e) + " has wrong size");
    const auto local = dofs.element_dofs(mesh, e);
    for (int a = 0; a < nt; ++a) {
      if (local[a] < 0) continue;
      for (int b = 0; b < nt; ++b)
        if (local[b] >= 0) triplets.emplace_back(local[a], local[b], S(a, b));
    }
  }
  TraceSystem sys{dofs, Eigen::SparseMatrix<double>(dofs.size(), dofs.size()), fingerprint};
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

Eigen::VectorXd apply_elementwise(const Mesh& mesh, const TraceDofMap& dofs,
                                  std::span<const CondensedElement> elements,
                                  const Eigen::VectorXd& x) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(dofs.size());
  const int nt = 3 * dofs.modes();
  Eigen::VectorXd xl(nt);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const auto local = dofs.element_dofs(mesh, e);
    for (int a = 0; a < nt; ++a) xl[a] = local[a] < 0 ? 0.0 : x[local[a]];
    const Eigen::VectorXd yl = elements[e].schur * xl;
    for (int a = 0; a < nt; ++a)
      if (local[a] >= 0) y[local[a]] += yl[a];
  }
  return y;
}

namespace {

class SparseLuFactorization final : public Factorization {
 public:
  SparseLuFactorization(const TraceSystem& sys)
      : Factorization(sys.fingerprint, static_cast<int>(sys.matrix.rows())) {
    lu_.analyzePattern(sys.matrix);
    lu_.factorize(sys.matrix);
    if (lu_.info() != Eigen::Success)
      throw SingularTraceSystem("sparse LU failed on trace matrix: " + lu_.lastErrorMessage());
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const override {
    // SparseLU::solve is logically const but not declared so
    return const_cast<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>&>(
               lu_)
        .solve(rhs);
  }

 private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

class GmresFactorization final : public Factorization {
 public:
  explicit GmresFactorization(const TraceSystem& sys)
      : Factorization(sys.fingerprint, static_cast<int>(sys.matrix.rows())),
        matrix_(sys.matrix) {
    gmres_.preconditioner().setDroptol(1e-6);
    gmres_.preconditioner().setFillfactor(20);
    gmres_.set_restart(60);
    gmres_.setTolerance(1e-13);
    gmres_.setMaxIterations(5000);
    gmres_.compute(matrix_);
    if (gmres_.info() != Eigen::Success)
      throw SingularTraceSystem("ILU preconditioner construction failed on trace matrix");
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const override {
    Eigen::MatrixXd x(rhs.rows(), rhs.cols());
    for (Eigen::Index j = 0; j < rhs.cols(); ++j) {
      const Eigen::VectorXd b = rhs.col(j);
      x.col(j) = gmres_.solve(b);
      const double bn = b.norm();
      if (bn > 0.0 && (matrix_ * x.col(j) - b).norm() > 1e-10 * bn)
        throw SingularTraceSystem("GMRES did not reach relative residual 1e-10");
    }
    return x;
  }

 private:
  Eigen::SparseMatrix<double> matrix_;
  Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres_;
};

}  // namespace

std::shared_ptr<const Factorization> factorize(const TraceSystem& system, SolverBackend backend) {
  if (system.matrix.rows() != system.matrix.cols())
    throw std::invalid_argument("factorize: trace matrix is not square");
  switch (backend) {
    case SolverBackend::GmresIlu:
      return std::make_shared<GmresFactorization>(system);
    case SolverBackend::SparseLU:
    default:
      return std::make_shared<SparseLuFactorization>(system);
  }
}

Eigen::MatrixXd solve_multi(const Factorization& factorization, const Eigen::MatrixXd& rhs) {
  if (rhs.rows() != factorization.size())
    throw std::invalid_argument("solve_multi: right-hand side has " + std::to_string(rhs.rows()) +
                                " rows, system has " + std::to_string(factorization.size()));
  if (rhs.cols() == 0) return Eigen::MatrixXd(rhs.rows(), 0);
  return factorization.solve(rhs);
}

Eigen::MatrixXd solve_multi(const Factorization& factorization, const Eigen::MatrixXd& rhs,
                            const Fingerprint& expected) {
  if (!(factorization.fingerprint() == expected))
    throw FingerprintMismatch("factorization was built from different coefficients");
  return solve_multi(factorization, rhs);
}

bool write_matrix_market(const Eigen::SparseMatrix<double>& matrix, const std::string& path) {
  return Eigen::saveMarket(matrix, path);
}

}  // namespace ehdg
