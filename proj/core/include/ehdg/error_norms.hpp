#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "ehdg/ensemble_solver.hpp"
#include "ehdg/postprocess.hpp"

namespace ehdg {

struct MemberErrors {
  double eq = 0.0;      // sqrt(dt sum_n ||q^n - q_h^n||^2)
  double eu = 0.0;      // ||u^N - u_h^N||
  double eustar = 0.0;  // sqrt(dt sum_n ||u^n - u*_h^n||^2)
};

/// Step observer accumulating the time-integrated errors against the exact
/// solution. All norms use elementwise quadrature of order 2k+4. Eu is taken
/// from the most recent observed state.
class ErrorAccumulator {
 public:
  /// Throws std::invalid_argument if a member has no exact solution.
  ErrorAccumulator(const ProblemSpec& spec, const Mesh& mesh, int k, double dt);

  void observe(int step, double time, const EnsembleState& state);
  StepObserver observer();

  std::vector<MemberErrors> result() const;

 private:
  void build_postprocessors(double time);

  const ProblemSpec& spec_;
  const Mesh& mesh_;
  int k_;
  double dt_;
  TriangleRule rule_;
  ElementBasis basis_, basis_next_;
  std::vector<Vec2> points_;     // physical points, element-major
  Eigen::VectorXd weights_;      // rule weight times det, element-major
  std::vector<std::unique_ptr<Postprocessor>> post_;
  std::vector<double> sum_q_, sum_ustar_;
  std::vector<Eigen::MatrixXd> last_u_;
  double last_time_ = 0.0;
};

/// Runs the solver to spec.final_time and returns the errors of every member.
std::vector<MemberErrors> compute_errors(const ProblemSpec& spec, const Mesh& mesh,
                                         const SolverOptions& options);

}  // namespace ehdg
