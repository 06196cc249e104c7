#include "ehdg/error_norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ehdg {

ErrorAccumulator::ErrorAccumulator(const ProblemSpec& spec, const Mesh& mesh, int k, double dt)
    : spec_(spec),
      mesh_(mesh),
      k_(k),
      dt_(dt),
      rule_(triangle_quadrature(2 * k + 4)),
      basis_(eval_element_basis(k, rule_.points)),
      basis_next_(eval_element_basis(k + 1, rule_.points)) {
  for (const auto& m : spec.members)
    if (!m.has_exact()) throw std::invalid_argument("error norms need an exact solution");
  const int nq = rule_.size();
  points_.reserve(static_cast<std::size_t>(mesh.num_elements()) * nq);
  weights_.resize(static_cast<Eigen::Index>(mesh.num_elements()) * nq);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    for (int q = 0; q < nq; ++q) {
      points_.push_back(g.map(rule_.points[q]));
      weights_[e * nq + q] = rule_.weights[q] * g.det;
    }
  }
  sum_q_.assign(spec.size(), 0.0);
  sum_ustar_.assign(spec.size(), 0.0);
  last_u_.resize(spec.size());
  if (spec.autonomous_coefficients) build_postprocessors(0.0);
}

void ErrorAccumulator::build_postprocessors(double time) {
  post_.clear();
  for (const auto& m : spec_.members)
    post_.push_back(std::make_unique<Postprocessor>(
        mesh_, k_, [&c = m.c, time](const Vec2& x) { return c(x, time); }));
}

void ErrorAccumulator::observe(int, double time, const EnsembleState& state) {
  if (!spec_.autonomous_coefficients) build_postprocessors(time);
  const int nq = rule_.size();
  const int np = basis_.dim;
  for (int j = 0; j < spec_.size(); ++j) {
    const Member& mem = spec_.members[j];
    const MemberState& ms = state.members[j];
    const ProjectedField ustar = post_[j]->apply(ms.q, ms.u);
    const int np1 = basis_next_.dim;
    double eq = 0.0, eus = 0.0;
    for (int e = 0; e < mesh_.num_elements(); ++e) {
      const Eigen::VectorXd qx = basis_.values.transpose() * ms.q.coeffs.col(e).head(np);
      const Eigen::VectorXd qy = basis_.values.transpose() * ms.q.coeffs.col(e).segment(np, np);
      const Eigen::VectorXd us = basis_next_.values.transpose() * ustar.coeffs.col(e).head(np1);
      for (int q = 0; q < nq; ++q) {
        const int idx = e * nq + q;
        const Vec2& x = points_[idx];
        const Vec2 qe = mem.exact_q(x, time);
        const double ue = mem.exact_u(x, time);
        const double dx = qe.x() - qx[q], dy = qe.y() - qy[q], du = ue - us[q];
        eq += weights_[idx] * (dx * dx + dy * dy);
        eus += weights_[idx] * du * du;
      }
    }
    sum_q_[j] += dt_ * eq;
    sum_ustar_[j] += dt_ * eus;
    last_u_[j] = ms.u.coeffs;
  }
  last_time_ = time;
}

StepObserver ErrorAccumulator::observer() {
  return [this](int step, double time, const EnsembleState& state) { observe(step, time, state); };
}

std::vector<MemberErrors> ErrorAccumulator::result() const {
  std::vector<MemberErrors> out(spec_.size());
  const int nq = rule_.size();
  const int np = basis_.dim;
  for (int j = 0; j < spec_.size(); ++j) {
    out[j].eq = std::sqrt(sum_q_[j]);
    out[j].eustar = std::sqrt(sum_ustar_[j]);
    if (last_u_[j].size() == 0) {
      out[j].eu = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double eu = 0.0;
    for (int e = 0; e < mesh_.num_elements(); ++e) {
      const Eigen::VectorXd uh = basis_.values.transpose() * last_u_[j].col(e).head(np);
      for (int q = 0; q < nq; ++q) {
        const int idx = e * nq + q;
        const double d = spec_.members[j].exact_u(points_[idx], last_time_) - uh[q];
        eu += weights_[idx] * d * d;
      }
    }
    out[j].eu = std::sqrt(eu);
  }
  return out;
}

std::vector<MemberErrors> compute_errors(const ProblemSpec& spec, const Mesh& mesh,
                                         const SolverOptions& options) {
  ErrorAccumulator acc(spec, mesh, options.degree, options.dt);
  const StepObserver obs = acc.observer();
  run(spec, mesh, options, spec.final_time, std::span<const StepObserver>(&obs, 1));
  return acc.result();
}

}  // namespace ehdg
