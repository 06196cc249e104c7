#pragma once

// Backward-Euler ensemble HDG time stepping.
//
// All J members are advanced with one trace matrix built from the ensemble
// means cbar = mean(c_j), betabar = mean(beta_j); the member deviations enter
// the right-hand sides lagged by one step. One factorization therefore serves
// J right-hand sides, and is reused across steps while the means do not change.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ehdg/hdg_local.hpp"
#include "ehdg/mesh.hpp"
#include "ehdg/polybasis.hpp"
#include "ehdg/projections.hpp"
#include "ehdg/sparse_linalg.hpp"
#include "ehdg/types.hpp"

namespace ehdg {

/// One parameterized convection-diffusion problem
///   c q + grad u = 0,  du/dt + div q + beta.grad u = f,  u = g on the boundary.
struct Member {
  SpaceTimeScalar c;      // inverse diffusivity, positive
  SpaceTimeVector beta;   // divergence-free velocity
  SpaceTimeScalar f;
  SpaceTimeScalar g;
  ScalarField u0;
  // Optional exact solution for error studies.
  SpaceTimeScalar exact_u;
  SpaceTimeVector exact_q;

  bool has_exact() const { return static_cast<bool>(exact_u) && static_cast<bool>(exact_q); }
};

struct ProblemSpec {
  std::string name;
  std::vector<Member> members;
  double final_time = 1.0;
  /// c_j and beta_j do not depend on t; sampled once and the trace matrix is
  /// factorized once per run.
  bool autonomous_coefficients = true;

  int size() const { return static_cast<int>(members.size()); }
};

/// Uniform time grid t_n = n dt, n = 0..steps.
struct TimeGrid {
  double dt = 1.0;
  int steps = 0;
  double time(int n) const { return n * dt; }
};

/// Pointwise ensemble means at the given points.
struct EnsembleMeans {
  Eigen::VectorXd c;
  Eigen::Matrix2Xd beta;
};
EnsembleMeans ensemble_means(const ProblemSpec& spec, double t, std::span<const Vec2> points);

struct AdmissibilityViolation {
  enum class Kind { NonPositive, MeanCondition };
  Kind kind;
  int member;
  int step;
  Vec2 point;
  double lhs;  // |cbar^n - c_j^n| or c_j^n
  double rhs;  // min(cbar^n, cbar^{n-1}) or 0
};

struct AdmissibilityReport {
  bool ok = true;
  double min_c = 0.0;
  long long samples = 0;
  long long violation_count = 0;
  std::vector<AdmissibilityViolation> violations;  // first few only
};

/// Samples |cbar^n - c_j^n| < min(cbar^n, cbar^{n-1}) and c_j^n > 0 at the
/// element quadrature points for every n and j (only n = 0, 1 when the
/// coefficients are autonomous). Never throws on a violation.
AdmissibilityReport check_admissibility(const ProblemSpec& spec, const Mesh& mesh,
                                        const TimeGrid& grid, int quadrature_order = 4);

struct TauChoice {
  double tau = 1.0;
  double beta_sup = 0.0;  // sup of max-component norm over samples
  bool condition_met = true;
  long long samples = 0;
};

/// tau = 1 + max_j sup |beta_j|_max, sampled at element vertices and at the
/// quadrature points of each element refined three times; raised if needed so
/// that min_j(tau + beta_j.n / 2) >= sup / 2 holds at the sampled face points.
TauChoice choose_tau(const ProblemSpec& spec, const Mesh& mesh, const TimeGrid& grid);

struct MemberState {
  ProjectedField q;  // degree k, 2 components
  ProjectedField u;  // degree k (k+1 for the initial state)
  Eigen::VectorXd trace;  // global trace unknowns; empty for the initial state
};

struct EnsembleState {
  int step = 0;
  double time = 0.0;
  std::vector<MemberState> members;
};

/// u_jh^0 = Pi_{k+1} u_j^0, q_jh^0 = Pi_k(-grad u_jh^0 / c_j^0).
EnsembleState initialize(const ProblemSpec& spec, const Mesh& mesh, int k);

struct SolverOptions {
  int degree = 1;
  double dt = 0.1;
  std::optional<double> tau;  // chosen by choose_tau when empty
  SolverBackend backend = SolverBackend::SparseLU;
  bool check_residual = true;
};

struct SolverStats {
  int factorizations = 0;
  int steps = 0;
  double last_residual = 0.0;  // max relative trace residual of the last step
  const Factorization* last_handle = nullptr;
};

using StepObserver = std::function<void(int step, double time, const EnsembleState& state)>;

class EnsembleSolver {
 public:
  EnsembleSolver(const ProblemSpec& spec, const Mesh& mesh, SolverOptions options);

  const ProblemSpec& spec() const { return spec_; }
  const Mesh& mesh() const { return mesh_; }
  const ReferenceTables& tables() const { return tables_; }
  const TraceDofMap& dofs() const { return dofs_; }
  const SolverOptions& options() const { return options_; }
  double tau() const { return tau_; }
  const SolverStats& stats() const { return stats_; }
  std::shared_ptr<const Factorization> factorization() const { return factorization_; }
  const ElementGeometry& geometry(int e) const { return geometry_[e]; }

  EnsembleState initial_state() const { return initialize(spec_, mesh_, options_.degree); }

  /// Advances all members from prev to step prev.step + 1.
  EnsembleState step(const EnsembleState& prev);

  /// Runs `steps` steps, calling every observer after each accepted step.
  EnsembleState run(EnsembleState state, int steps, std::span<const StepObserver> observers = {});

  /// Per-member coefficient samples on element e at time t (cached when autonomous).
  const CoefficientSamples& member_samples(int member, int element) const {
    return member_samples_[member][element];
  }

 private:
  void sample_coefficients_at(double t);
  void rebuild_matrix(const Fingerprint& fp);

  const ProblemSpec& spec_;
  const Mesh& mesh_;
  SolverOptions options_;
  ReferenceTables tables_;
  TraceDofMap dofs_;
  double tau_ = 1.0;
  std::vector<ElementGeometry> geometry_;
  std::vector<std::vector<CoefficientSamples>> member_samples_;  // [j][e]
  std::vector<CoefficientSamples> mean_samples_;                 // [e]
  std::vector<std::vector<Eigen::MatrixXd>> lag_;                // [j][e], autonomous only
  bool sampled_ = false;
  Fingerprint mean_fingerprint_;
  std::vector<CondensedElement> condensed_;
  std::shared_ptr<const TraceSystem> system_;
  std::shared_ptr<const Factorization> factorization_;
  SolverStats stats_;
};

/// Steps N = round(T/dt); throws std::invalid_argument unless T/dt is an
/// integer to within 1e-9 relative.
int step_count(double final_time, double dt);

/// Convenience driver: initialize, then advance to T.
EnsembleState run(const ProblemSpec& spec, const Mesh& mesh, const SolverOptions& options,
                  double final_time, std::span<const StepObserver> observers = {});

}  // namespace ehdg
