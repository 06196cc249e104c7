#pragma once

#include <cstdint>
#include <string>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "ehdg/hdg_local.hpp"
#include "ehdg/mesh.hpp"

namespace ehdg {

/// Global numbering of trace unknowns: interior faces in face order, modes
/// innermost. Boundary faces carry no unknowns.
class TraceDofMap {
 public:
  TraceDofMap(const Mesh& mesh, int k);

  int degree() const { return k_; }
  int modes() const { return nf_; }
  int size() const { return size_; }
  /// First global index of face f, or -1 on the boundary.
  int face_offset(int f) const { return offset_[f]; }

  /// Global indices of the 3*nf local trace unknowns of an element, -1 for
  /// boundary faces.
  std::vector<int> element_dofs(const Mesh& mesh, int element) const;

 private:
  int k_, nf_, size_ = 0;
  std::vector<int> offset_;
};

/// Identifies the inputs a trace matrix was assembled from.
struct Fingerprint {
  std::uint64_t value = 0;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

/// FNV-1a style hash combiner for building fingerprints.
class FingerprintBuilder {
 public:
  FingerprintBuilder& add(std::span<const double> values);
  FingerprintBuilder& add(double v) { return add(std::span<const double>(&v, 1)); }
  FingerprintBuilder& add(std::uint64_t v);
  Fingerprint build() const { return {hash_}; }

 private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

struct TraceSystem {
  TraceDofMap dofs;
  Eigen::SparseMatrix<double> matrix;
  Fingerprint fingerprint;
};

/// Scatter of element Schur complements. Throws std::invalid_argument on a
/// size mismatch.
TraceSystem assemble_trace_matrix(const Mesh& mesh, const TraceDofMap& dofs,
                                  std::span<const CondensedElement> elements,
                                  Fingerprint fingerprint = {});

/// y = A x applied element by element, without the assembled matrix.
Eigen::VectorXd apply_elementwise(const Mesh& mesh, const TraceDofMap& dofs,
                                  std::span<const CondensedElement> elements,
                                  const Eigen::VectorXd& x);

enum class SolverBackend { SparseLU, GmresIlu };

/// Read-only factorized trace matrix. Solves may run concurrently.
class Factorization {
 public:
  virtual ~Factorization() = default;
  const Fingerprint& fingerprint() const { return fingerprint_; }
  int size() const { return size_; }
  /// One solution column per right-hand-side column.
  virtual Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const = 0;

 protected:
  Factorization(Fingerprint fp, int size) : fingerprint_(fp), size_(size) {}

 private:
  Fingerprint fingerprint_;
  int size_;
};

/// Throws SingularTraceSystem when the factorization fails.
std::shared_ptr<const Factorization> factorize(const TraceSystem& system,
                                               SolverBackend backend = SolverBackend::SparseLU);

/// Throws std::invalid_argument on a row mismatch.
Eigen::MatrixXd solve_multi(const Factorization& factorization, const Eigen::MatrixXd& rhs);
/// As above, and rejects a factorization built from other coefficients with
/// FingerprintMismatch.
Eigen::MatrixXd solve_multi(const Factorization& factorization, const Eigen::MatrixXd& rhs,
                            const Fingerprint& expected);

/// Matrix Market coordinate dump. Returns false if the file cannot be written.
bool write_matrix_market(const Eigen::SparseMatrix<double>& matrix, const std::string& path);

}  // namespace ehdg
