#include "ehdg/ensemble_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ehdg/exceptions.hpp"

namespace ehdg {

EnsembleMeans ensemble_means(const ProblemSpec& spec, double t, std::span<const Vec2> points) {
  const int J = spec.size();
  if (J < 1) throw std::invalid_argument("ensemble needs at least one member");
  EnsembleMeans m;
  m.c = Eigen::VectorXd::Zero(points.size());
  m.beta = Eigen::Matrix2Xd::Zero(2, points.size());
  for (const auto& mem : spec.members)
    for (std::size_t p = 0; p < points.size(); ++p) {
      m.c[p] += mem.c(points[p], t);
      m.beta.col(p) += mem.beta(points[p], t);
    }
  m.c /= J;
  m.beta /= J;
  return m;
}

namespace {

std::vector<Vec2> element_sample_points(const Mesh& mesh, int order) {
  const TriangleRule rule = triangle_quadrature(order);
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(mesh.num_elements()) * rule.size());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const ElementGeometry g = element_geometry(mesh, e);
    for (const auto& p : rule.points) pts.push_back(g.map(p));
  }
  return pts;
}

}  // namespace

AdmissibilityReport check_admissibility(const ProblemSpec& spec, const Mesh& mesh,
                                        const TimeGrid& grid, int quadrature_order) {
  constexpr std::size_t kMaxListed = 32;
  AdmissibilityReport report;
  report.min_c = std::numeric_limits<double>::infinity();
  const auto points = element_sample_points(mesh, quadrature_order);
  const int J = spec.size();
  const int last = spec.autonomous_coefficients ? std::min(grid.steps, 1) : grid.steps;

  const auto record = [&](AdmissibilityViolation v) {
    report.ok = false;
    ++report.violation_count;
    if (report.violations.size() < kMaxListed) report.violations.push_back(v);
  };

  Eigen::VectorXd prev_mean;
  for (int n = 0; n <= last; ++n) {
    const double t = grid.time(n);
    Eigen::MatrixXd c(J, points.size());
    for (int j = 0; j < J; ++j)
      for (std::size_t p = 0; p < points.size(); ++p) c(j, p) = spec.members[j].c(points[p], t);
    const Eigen::VectorXd mean = c.colwise().sum().transpose() / J;
    for (int j = 0; j < J; ++j)
      for (std::size_t p = 0; p < points.size(); ++p) {
        ++report.samples;
        report.min_c = std::min(report.min_c, c(j, p));
        if (!(c(j, p) > 0.0))
          record({AdmissibilityViolation::Kind::NonPositive, j, n, points[p], c(j, p), 0.0});
        if (n == 0) continue;
        const double lhs = std::abs(mean[p] - c(j, p));
        const double rhs = std::min(mean[p], prev_mean[p]);
        if (!(lhs < rhs))
          record({AdmissibilityViolation::Kind::MeanCondition, j, n, points[p], lhs, rhs});
      }
    prev_mean = mean;
  }
  return report;
}

TauChoice choose_tau(const ProblemSpec& spec, const Mesh& mesh, const TimeGrid& grid) {
  // reference sample points: vertices plus order-4 quadrature points of the
  // 64 sub-triangles of three uniform refinements
  std::vector<Vec2> ref = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  {
    constexpr int m = 8;
    const TriangleRule rule = triangle_quadrature(4);
    const double h = 1.0 / m;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i + j < m; ++i) {
        const Vec2 o(i * h, j * h);
        for (const auto& p : rule.points) ref.push_back(o + h * p);
        if (i + j + 1 < m)  // the downward sub-triangle of this cell
          for (const auto& p : rule.points)
            ref.push_back(Vec2((i + 1) * h, (j + 1) * h) - h * p);
      }
  }
  const EdgeRule edge = edge_quadrature(6);

  TauChoice out;
  const int last = spec.autonomous_coefficients ? 0 : grid.steps;
  for (int n = 0; n <= last; ++n) {
    const double t = grid.time(n);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const ElementGeometry g = element_geometry(mesh, e);
      for (const auto& p : ref) {
        const Vec2 x = g.map(p);
        for (const auto& mem : spec.members) {
          out.beta_sup = std::max(out.beta_sup, mem.beta(x, t).cwiseAbs().maxCoeff());
          ++out.samples;
        }
      }
    }
  }
  out.tau = 1.0 + out.beta_sup;

  // verify min_j (tau + beta_j.n/2) >= sup/2 on sampled face points
  double needed = 0.0;
  for (int n = 0; n <= last; ++n) {
    const double t = grid.time(n);
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const Vec2& a = mesh.vertices()[mesh.faces()[f][0]];
      const Vec2& b = mesh.vertices()[mesh.faces()[f][1]];
      const Vec2 nrm = mesh.face_normal(f);
      std::vector<double> s(edge.points);
      s.push_back(0.0);
      s.push_back(1.0);
      for (double sp : s) {
        const Vec2 x = a + sp * (b - a);
        for (const auto& mem : spec.members) {
          const double bn = mem.beta(x, t).dot(nrm);
          // both orientations of the face
          needed = std::max(needed, 0.5 * out.beta_sup + 0.5 * std::abs(bn));
        }
      }
    }
  }
  if (out.tau < needed) {
    out.condition_met = false;
    out.tau = needed;
  }
  return out;
}

EnsembleState initialize(const ProblemSpec& spec, const Mesh& mesh, int k) {
  EnsembleState state;
  state.step = 0;
  state.time = 0.0;
  const TriangleRule rule = triangle_quadrature(2 * k + 4);
  const ElementBasis basis = eval_element_basis(k, rule.points);
  const ElementBasis next = eval_element_basis(k + 1, rule.points);
  const int np = basis.dim;
  for (const auto& mem : spec.members) {
    MemberState ms;
    ms.u = l2_project_element(mem.u0, mesh, k + 1);
    ms.q = zero_field(mesh, k, 2);
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const ElementGeometry g = element_geometry(mesh, e);
      const Eigen::VectorXd& uc = ms.u.coeffs.col(e);
      for (int q = 0; q < rule.size(); ++q) {
        const Vec2 ref_grad(uc.dot(next.grad[0].col(q)), uc.dot(next.grad[1].col(q)));
        const Vec2 grad = g.inverse_transpose * ref_grad;
        const double c0 = mem.c(g.map(rule.points[q]), 0.0);
        const double w = rule.weights[q];  // det cancels against the orthonormal mass
        ms.q.coeffs.col(e).head(np) -= (w * grad.x() / c0) * basis.values.col(q);
        ms.q.coeffs.col(e).tail(np) -= (w * grad.y() / c0) * basis.values.col(q);
      }
    }
    state.members.push_back(std::move(ms));
  }
  return state;
}

int step_count(double final_time, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (final_time < 0.0) throw std::invalid_argument("final time must be non-negative");
  const double ratio = final_time / dt;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("final time " + std::to_string(final_time) +
                                " is not an integer multiple of dt " + std::to_string(dt));
  return static_cast<int>(n);
}

EnsembleSolver::EnsembleSolver(const ProblemSpec& spec, const Mesh& mesh, SolverOptions options)
    : spec_(spec),
      mesh_(mesh),
      options_(options),
      tables_(options.degree),
      dofs_(mesh, options.degree) {
  if (spec.size() < 1) throw std::invalid_argument("ensemble needs at least one member");
  if (!(options.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  geometry_.reserve(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) geometry_.push_back(element_geometry(mesh, e));
  if (options.tau) {
    if (!(*options.tau > 0.0)) throw std::invalid_argument("tau must be positive");
    tau_ = *options.tau;
  } else {
    const int steps = static_cast<int>(std::ceil(spec.final_time / options.dt - 1e-9));
    tau_ = choose_tau(spec, mesh, {options.dt, std::max(steps, 0)}).tau;
  }
  member_samples_.resize(spec.size());
}

void EnsembleSolver::sample_coefficients_at(double t) {
  if (sampled_ && spec_.autonomous_coefficients) return;
  const int J = spec_.size();
  const int ne = mesh_.num_elements();
  for (int j = 0; j < J; ++j) {
    member_samples_[j].resize(ne);
    for (int e = 0; e < ne; ++e)
      member_samples_[j][e] = sample_coefficients(geometry_[e], tables_, spec_.members[j].c,
                                                   spec_.members[j].beta, t);
  }
  mean_samples_.resize(ne);
  FingerprintBuilder fp;
  fp.add(static_cast<std::uint64_t>(options_.degree))
      .add(static_cast<std::uint64_t>(ne))
      .add(static_cast<std::uint64_t>(mesh_.num_faces()))
      .add(options_.dt)
      .add(tau_);
  for (int e = 0; e < ne; ++e) {
    CoefficientSamples m = member_samples_[0][e];
    for (int j = 1; j < J; ++j) {
      m.c += member_samples_[j][e].c;
      m.beta += member_samples_[j][e].beta;
      for (int i = 0; i < 3; ++i) m.beta_face[i] += member_samples_[j][e].beta_face[i];
    }
    m.c /= J;
    m.beta /= J;
    for (int i = 0; i < 3; ++i) m.beta_face[i] /= J;
    fp.add(std::span<const double>(m.c.data(), m.c.size()));
    fp.add(std::span<const double>(m.beta.data(), m.beta.size()));
    for (int i = 0; i < 3; ++i)
      fp.add(std::span<const double>(m.beta_face[i].data(), m.beta_face[i].size()));
    mean_samples_[e] = std::move(m);
  }
  for (const auto& v : mesh_.vertices()) fp.add(std::span<const double>(v.data(), 2));
  mean_fingerprint_ = fp.build();
  sampled_ = true;
  lag_.clear();
  if (J > 1 && spec_.autonomous_coefficients) {
    lag_.resize(J);
    for (int j = 0; j < J; ++j)
      for (int e = 0; e < ne; ++e)
        lag_[j].push_back(lag_operator(geometry_[e], tables_, mean_samples_[e], member_samples_[j][e]));
  }
}

void EnsembleSolver::rebuild_matrix(const Fingerprint& fp) {
  const int ne = mesh_.num_elements();
  condensed_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const LocalBlocks blocks =
        assemble_local_blocks(geometry_[e], tables_, mean_samples_[e], tau_, options_.dt, e);
    condensed_[e] = condense(blocks, e);
  }
  system_ = std::make_shared<TraceSystem>(assemble_trace_matrix(mesh_, dofs_, condensed_, fp));
  factorization_ = factorize(*system_, options_.backend);
  ++stats_.factorizations;
}

EnsembleState EnsembleSolver::step(const EnsembleState& prev) {
  const int J = spec_.size();
  if (static_cast<int>(prev.members.size()) != J)
    throw std::invalid_argument("state has the wrong number of members");
  const int ne = mesh_.num_elements();
  const int n = prev.step + 1;
  const double t = n * options_.dt;
  const LocalLayout L(options_.degree);
  const int nt = L.trace_size();

  sample_coefficients_at(t);
  if (!factorization_ || !(factorization_->fingerprint() == mean_fingerprint_))
    rebuild_matrix(mean_fingerprint_);

  std::vector<Eigen::MatrixXd> local(ne);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(dofs_.size(), J);
  std::vector<std::vector<int>> element_dofs(ne);
  Eigen::VectorXd lag_in(3 * L.np);
  for (int e = 0; e < ne; ++e) {
    const ElementGeometry& g = geometry_[e];
    local[e].resize(L.size(), J);
    for (int j = 0; j < J; ++j) {
      const Member& mem = spec_.members[j];
      const MemberState& ps = prev.members[j];
      const LocalData data = sample_data(g, tables_, mem.f, mem.g, t);
      if (!lag_.empty() && ps.u.degree == L.k) {
        lag_in << ps.q.coeffs.col(e), ps.u.coeffs.col(e);
        local[e].col(j) = local_rhs(g, tables_, mean_samples_[e], mean_samples_[e], data,
                                    ps.q.coeffs.col(e), ps.u.coeffs.col(e), ps.u.degree, tau_,
                                    options_.dt);
        local[e].col(j).noalias() += lag_[j][e] * lag_in;
        continue;
      }
      const CoefficientSamples& ms = J == 1 ? mean_samples_[e] : member_samples_[j][e];
      local[e].col(j) = local_rhs(g, tables_, mean_samples_[e], ms, data, ps.q.coeffs.col(e),
                                  ps.u.coeffs.col(e), ps.u.degree, tau_, options_.dt);
    }
    const Eigen::MatrixXd tr = condensed_[e].trace_rhs(local[e]);
    element_dofs[e] = dofs_.element_dofs(mesh_, e);
    for (int a = 0; a < nt; ++a)
      if (element_dofs[e][a] >= 0) rhs.row(element_dofs[e][a]) += tr.row(a);
  }

  const Eigen::MatrixXd x = solve_multi(*factorization_, rhs, mean_fingerprint_);
  stats_.last_handle = factorization_.get();

  stats_.last_residual = 0.0;
  if (options_.check_residual && dofs_.size() > 0) {
    for (int j = 0; j < J; ++j) {
      const double bn = rhs.col(j).norm();
      if (bn == 0.0) continue;
      const double r = (system_->matrix * x.col(j) - rhs.col(j)).norm() / bn;
      stats_.last_residual = std::max(stats_.last_residual, r);
    }
  }

  EnsembleState next;
  next.step = n;
  next.time = t;
  next.members.resize(J);
  for (int j = 0; j < J; ++j) {
    next.members[j].q = zero_field(mesh_, L.k, 2);
    next.members[j].u = zero_field(mesh_, L.k, 1);
    next.members[j].trace = x.col(j);
  }
  Eigen::MatrixXd trace(nt, J);
  for (int e = 0; e < ne; ++e) {
    for (int a = 0; a < nt; ++a) {
      const int d = element_dofs[e][a];
      if (d >= 0)
        trace.row(a) = x.row(d);
      else
        trace.row(a).setZero();
    }
    const Eigen::MatrixXd interior = condensed_[e].recover_interior(trace, local[e]);
    for (int j = 0; j < J; ++j) {
      next.members[j].q.coeffs.col(e) = interior.col(j).head(L.q_size());
      next.members[j].u.coeffs.col(e) = interior.col(j).segment(L.u_offset(), L.np);
    }
  }
  ++stats_.steps;
  return next;
}

EnsembleState EnsembleSolver::run(EnsembleState state, int steps,
                                  std::span<const StepObserver> observers) {
  for (int s = 0; s < steps; ++s) {
    state = step(state);
    for (const auto& obs : observers) obs(state.step, state.time, state);
  }
  return state;
}

EnsembleState run(const ProblemSpec& spec, const Mesh& mesh, const SolverOptions& options,
                  double final_time, std::span<const StepObserver> observers) {
  const int steps = step_count(final_time, options.dt);
  EnsembleSolver solver(spec, mesh, options);
  return solver.run(solver.initial_state(), steps, observers);
}

}  // namespace ehdg
