#include "ehdg/polybasis.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace ehdg {

namespace {

// n-point Gauss-Legendre on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2 * m - 1) * z * p1 - (m - 1) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged root
    double p0 = 1.0, p1 = z;
    for (int m = 2; m <= n; ++m) {
      const double p2 = ((2 * m - 1) * z * p1 - (m - 1) * p0) / m;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

long double factorial_ld(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

void check_order(int order) {
  if (order < 1 || order > 20)
    throw std::invalid_argument("quadrature order " + std::to_string(order) +
                                " outside supported range [1, 20]");
}

void check_degree(int k) {
  if (k < 0 || k > kMaxBasisDegree)
    throw std::invalid_argument("basis degree " + std::to_string(k) +
                                " outside supported range [0, " +
                                std::to_string(kMaxBasisDegree) + "]");
}

Eigen::VectorXd monomials(int k, const Vec2& p) {
  const auto exps = monomial_exponents(k);
  Eigen::VectorXd m(exps.size());
  for (std::size_t i = 0; i < exps.size(); ++i)
    m[i] = std::pow(p.x(), exps[i][0]) * std::pow(p.y(), exps[i][1]);
  return m;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> monomial_gradients(int k, const Vec2& p) {
  const auto exps = monomial_exponents(k);
  Eigen::Matrix<double, Eigen::Dynamic, 2> g(exps.size(), 2);
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const auto [a, b] = exps[i];
    g(i, 0) = a == 0 ? 0.0 : a * std::pow(p.x(), a - 1) * std::pow(p.y(), b);
    g(i, 1) = b == 0 ? 0.0 : b * std::pow(p.x(), a) * std::pow(p.y(), b - 1);
  }
  return g;
}

// Orthonormal Legendre polynomial of degree m on [0,1].
double legendre01(int m, double s) {
  const double z = 2.0 * s - 1.0;
  double p0 = 1.0, p1 = z;
  if (m == 0) return 1.0;
  for (int j = 2; j <= m; ++j) {
    const double p2 = ((2 * j - 1) * z * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return std::sqrt(2.0 * m + 1.0) * p1;
}

}  // namespace

TriangleRule triangle_quadrature(int order) {
  check_order(order);
  // Collapsed map x = u, y = v(1-u), Jacobian (1-u). The integrand in u has
  // degree order+1, in v degree order.
  const int n = (order + 3) / 2;
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  TriangleRule rule;
  rule.order = order;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (gx[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (gx[j] + 1.0);
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(0.25 * gw[i] * gw[j] * (1.0 - u));
    }
  }
  return rule;
}

EdgeRule edge_quadrature(int order) {
  check_order(order);
  const int n = order / 2 + 1;
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  EdgeRule rule;
  rule.order = order;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (gx[i] + 1.0));
    rule.weights.push_back(0.5 * gw[i]);
  }
  return rule;
}

std::vector<std::array<int, 2>> monomial_exponents(int k) {
  std::vector<std::array<int, 2>> e;
  e.reserve(element_dim(k));
  for (int d = 0; d <= k; ++d)
    for (int b = 0; b <= d; ++b) e.push_back({d - b, b});
  return e;
}

const Eigen::MatrixXd& orthonormal_coefficients(int k) {
  check_degree(k);
  static std::array<Eigen::MatrixXd, kMaxBasisDegree + 1> cache;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int deg = 0; deg <= kMaxBasisDegree; ++deg) {
      const auto exps = monomial_exponents(deg);
      const int n = static_cast<int>(exps.size());
      // extended precision: the monomial Gram matrix is badly conditioned at high degree
      using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
      MatrixXld gram(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int a = exps[i][0] + exps[j][0];
          const int b = exps[i][1] + exps[j][1];
          gram(i, j) = factorial_ld(a) * factorial_ld(b) / factorial_ld(a + b + 2);
        }
      Eigen::LLT<MatrixXld> llt(gram);
      const MatrixXld L = llt.matrixL();
      cache[deg] = L.triangularView<Eigen::Lower>().solve(MatrixXld::Identity(n, n)).cast<double>();
    }
  });
  return cache[k];
}

Eigen::VectorXd element_basis_at(int k, const Vec2& ref) {
  return orthonormal_coefficients(k) * monomials(k, ref);
}

Eigen::Matrix<double, Eigen::Dynamic, 2> element_basis_gradient_at(int k, const Vec2& ref) {
  return orthonormal_coefficients(k) * monomial_gradients(k, ref);
}

ElementBasis eval_element_basis(int k, std::span<const Vec2> points) {
  check_degree(k);
  ElementBasis b;
  b.degree = k;
  b.dim = element_dim(k);
  const int nq = static_cast<int>(points.size());
  b.values.resize(b.dim, nq);
  b.grad[0].resize(b.dim, nq);
  b.grad[1].resize(b.dim, nq);
  for (int q = 0; q < nq; ++q) {
    b.values.col(q) = element_basis_at(k, points[q]);
    const auto g = element_basis_gradient_at(k, points[q]);
    b.grad[0].col(q) = g.col(0);
    b.grad[1].col(q) = g.col(1);
  }
  return b;
}

FaceBasis eval_face_basis(int k, std::span<const double> points) {
  check_degree(k);
  FaceBasis b;
  b.degree = k;
  b.dim = face_dim(k);
  b.values.resize(b.dim, points.size());
  for (std::size_t q = 0; q < points.size(); ++q)
    for (int m = 0; m < b.dim; ++m) b.values(m, q) = legendre01(m, points[q]);
  return b;
}

Vec2 reference_edge_point(int local_face, double s) {
  static const std::array<Vec2, 3> verts = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  const Vec2& a = verts[(local_face + 1) % 3];
  const Vec2& b = verts[(local_face + 2) % 3];
  return a + s * (b - a);
}

namespace {

ReferenceTables::ElementSet make_element_set(int k, int order) {
  ReferenceTables::ElementSet set;
  set.rule = triangle_quadrature(order);
  set.basis = eval_element_basis(k, set.rule.points);
  set.basis_next = eval_element_basis(k + 1, set.rule.points);
  return set;
}

ReferenceTables::FaceSet make_face_set(int k, int order) {
  ReferenceTables::FaceSet set;
  set.rule = edge_quadrature(order);
  std::vector<double> reversed(set.rule.points.size());
  for (std::size_t q = 0; q < reversed.size(); ++q) reversed[q] = 1.0 - set.rule.points[q];
  set.trace = eval_face_basis(k, set.rule.points);
  set.trace_reversed = eval_face_basis(k, reversed);
  for (int i = 0; i < 3; ++i) {
    for (double s : set.rule.points) set.ref_points[i].push_back(reference_edge_point(i, s));
    set.element[i] = eval_element_basis(k, set.ref_points[i]);
    set.element_next[i] = eval_element_basis(k + 1, set.ref_points[i]);
  }
  return set;
}

}  // namespace

ReferenceTables::ReferenceTables(int k) : k_(k) {
  if (k < 0 || k > kMaxSchemeDegree)
    throw std::invalid_argument("scheme degree " + std::to_string(k) +
                                " outside supported range [0, " +
                                std::to_string(kMaxSchemeDegree) + "]");
  element_ = make_element_set(k, 2 * k + 2);
  element_data_ = make_element_set(k, 2 * k + 4);
  face_ = make_face_set(k, 2 * k + 2);
  face_data_ = make_face_set(k, 2 * k + 4);
}

}  // namespace ehdg
