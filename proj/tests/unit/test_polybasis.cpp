#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ehdg/polybasis.hpp"

using namespace ehdg;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// exact integral of x^a y^b over the reference triangle
double monomial_integral(int a, int b) {
  return factorial(a) * factorial(b) / factorial(a + b + 2);
}

}  // namespace

TEST_CASE("triangle rules integrate monomials exactly up to their order") {
  for (int order = 1; order <= 20; ++order) {
    const TriangleRule r = triangle_quadrature(order);
    CHECK(r.order >= order);
    for (int d = 0; d <= order; ++d)
      for (int b = 0; b <= d; ++b) {
        const int a = d - b;
        double s = 0.0;
        for (int q = 0; q < r.size(); ++q)
          s += r.weights[q] * std::pow(r.points[q].x(), a) * std::pow(r.points[q].y(), b);
        CHECK(s == doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
      }
  }
}

TEST_CASE("edge rules integrate polynomials exactly up to their order") {
  for (int order = 1; order <= 20; ++order) {
    const EdgeRule r = edge_quadrature(order);
    for (int d = 0; d <= order; ++d) {
      double s = 0.0;
      for (int q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q], d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("quadrature orders outside 1..20 are rejected") {
  CHECK_THROWS_AS(triangle_quadrature(0), std::invalid_argument);
  CHECK_THROWS_AS(triangle_quadrature(21), std::invalid_argument);
  CHECK_THROWS_AS(edge_quadrature(0), std::invalid_argument);
  CHECK_THROWS_AS(edge_quadrature(21), std::invalid_argument);
}

TEST_CASE("element basis is orthonormal on the reference triangle") {
  for (int k = 0; k <= kMaxBasisDegree; ++k) {
    const TriangleRule r = triangle_quadrature(std::min(2 * k + 1, 20));
    const ElementBasis b = eval_element_basis(k, r.points);
    REQUIRE(b.dim == element_dim(k));
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(b.dim, b.dim);
    for (int q = 0; q < r.size(); ++q) G += r.weights[q] * b.values.col(q) * b.values.col(q).transpose();
    // monomial cancellation costs accuracy above the degrees the solver uses
    const double tol = k <= kMaxSchemeDegree + 1 ? 1e-12 : 1e-10;
    CHECK((G - Eigen::MatrixXd::Identity(b.dim, b.dim)).cwiseAbs().maxCoeff() < tol);
  }
}

TEST_CASE("element basis is hierarchical") {
  const std::vector<Vec2> pts = {Vec2(0.1, 0.2), Vec2(0.7, 0.05), Vec2(1.0 / 3, 1.0 / 3)};
  for (int k = 1; k <= kMaxBasisDegree; ++k) {
    const ElementBasis lo = eval_element_basis(k - 1, pts);
    const ElementBasis hi = eval_element_basis(k, pts);
    CHECK((hi.values.topRows(lo.dim) - lo.values).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((hi.grad[0].topRows(lo.dim) - lo.grad[0]).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("basis gradients match central differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.05, 0.45);
  const double h = 1e-6;
  for (int k = 0; k <= 4; ++k)
    for (int trial = 0; trial < 5; ++trial) {
      const Vec2 x(U(rng), U(rng));
      const auto g = element_basis_gradient_at(k, x);
      const Eigen::VectorXd dx =
          (element_basis_at(k, x + Vec2(h, 0)) - element_basis_at(k, x - Vec2(h, 0))) / (2 * h);
      const Eigen::VectorXd dy =
          (element_basis_at(k, x + Vec2(0, h)) - element_basis_at(k, x - Vec2(0, h))) / (2 * h);
      CHECK((g.col(0) - dx).cwiseAbs().maxCoeff() < 1e-6);
      CHECK((g.col(1) - dy).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("face basis is orthonormal on [0,1]") {
  for (int k = 0; k <= kMaxBasisDegree; ++k) {
    const EdgeRule r = edge_quadrature(2 * k + 1);
    const FaceBasis b = eval_face_basis(k, r.points);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(b.dim, b.dim);
    for (int q = 0; q < r.size(); ++q) G += r.weights[q] * b.values.col(q) * b.values.col(q).transpose();
    // monomial cancellation costs accuracy above the degrees the solver uses
    const double tol = k <= kMaxSchemeDegree + 1 ? 1e-12 : 1e-10;
    CHECK((G - Eigen::MatrixXd::Identity(b.dim, b.dim)).cwiseAbs().maxCoeff() < tol);
  }
}

TEST_CASE("reference edges run from vertex i+1 to vertex i+2") {
  const Vec2 v[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  for (int i = 0; i < 3; ++i) {
    CHECK((reference_edge_point(i, 0.0) - v[(i + 1) % 3]).norm() < 1e-15);
    CHECK((reference_edge_point(i, 1.0) - v[(i + 2) % 3]).norm() < 1e-15);
  }
}

TEST_CASE("reference tables: reversed trace is the trace at 1-s") {
  const ReferenceTables t(2);
  const auto& f = t.face();
  const int n = f.rule.size();
  for (int q = 0; q < n; ++q) {
    const FaceBasis at = eval_face_basis(2, std::vector<double>{1.0 - f.rule.points[q]});
    CHECK((f.trace_reversed.values.col(q) - at.values.col(0)).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK_THROWS_AS(ReferenceTables(kMaxSchemeDegree + 1), std::invalid_argument);
  CHECK_THROWS_AS(ReferenceTables(-1), std::invalid_argument);
}
