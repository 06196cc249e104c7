#include <doctest.h>

#include <random>
#include <stdexcept>

#include <Eigen/LU>

#include "ehdg/exceptions.hpp"
#include "ehdg/postprocess.hpp"
#include "oracle_quadrature.hpp"

using namespace ehdg;

namespace {

double c_quad(const Vec2& x) { return 1.0 + 0.5 * x.x() * x.x() + 0.25 * x.y(); }

Eigen::VectorXd samples(const ScalarField& c, const TriangleRule& rule, const ElementGeometry& g) {
  Eigen::VectorXd s(rule.size());
  for (int i = 0; i < rule.size(); ++i) s[i] = c(g.map(rule.points[i]));
  return s;
}

// Bordered system in scaled physical monomials of degree k+1; returns u* at x.
double oracle_ustar(const ElementGeometry& g, int k, const Eigen::VectorXd& q, const Eigen::VectorXd& u,
                    const ScalarField& c, const Vec2& at) {
  const Vec2 center = (g.vertices[0] + g.vertices[1] + g.vertices[2]) / 3.0;
  const oracle::MonomialSpace S(k + 1, center, std::sqrt(g.area));
  const int n = S.dim(), np = element_dim(k);
  const Eigen::Matrix2d inv = g.jacobian.inverse();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  for (const auto& p : oracle::triangle_points(g.vertices, 2 * k + 8)) {
    const Eigen::VectorXd m = S.values(p.x);
    const Eigen::MatrixXd dm = S.gradients(p.x);
    const Eigen::VectorXd phi = element_basis_at(k, inv * (p.x - g.vertices[0]));
    const Vec2 qh(q.head(np).dot(phi), q.tail(np).dot(phi));
    A.topLeftCorner(n, n) += p.w * dm * dm.transpose();
    A.block(0, n, n, 1) += p.w * m;
    A.block(n, 0, 1, n) += p.w * m.transpose();
    b.head(n) -= p.w * c(p.x) * dm * qh;
    b[n] += p.w * u[0] * phi[0];
  }
  const Eigen::VectorXd a = A.partialPivLu().solve(b);
  return a.head(n).dot(S.values(at));
}

Mesh skewed_mesh() {
  return Mesh({Vec2(0.1, 0.2), Vec2(0.9, 0.35), Vec2(0.3, 0.8), Vec2(1.1, 0.95)}, {{0, 1, 2}, {1, 3, 2}});
}

}  // namespace

TEST_CASE("element reconstruction matches a monomial bordered system") {
  const Mesh m = skewed_mesh();
  std::mt19937 rng(13);
  std::normal_distribution<double> N;
  for (int k = 0; k <= kMaxSchemeDegree; ++k) {
    const TriangleRule rule = triangle_quadrature(2 * k + 2);
    for (int e = 0; e < m.num_elements(); ++e) {
      const ElementGeometry g = element_geometry(m, e);
      Eigen::VectorXd q(2 * element_dim(k)), u(element_dim(k));
      for (auto& v : q) v = N(rng);
      for (auto& v : u) v = N(rng);
      const Eigen::VectorXd us = postprocess_element(q, u, samples(c_quad, rule, g), rule, g, k, e);
      REQUIRE(us.size() == element_dim(k + 1));
      for (const Vec2& r : {Vec2(0.1, 0.1), Vec2(0.5, 0.3), Vec2(0.2, 0.7)}) {
        const double ref = oracle_ustar(g, k, q, u, c_quad, g.map(r));
        CHECK(us.dot(element_basis_at(k + 1, r)) == doctest::Approx(ref).epsilon(1e-10));
      }
      // element mean is preserved
      CHECK(us[0] == doctest::Approx(u[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("reconstruction reproduces polynomials of degree k+1") {
  const Mesh m = build_uniform_square_mesh(3);
  const double c = 2.5;
  for (int k = 0; k <= 2; ++k) {
    const ScalarField u = [k](const Vec2& x) {
      double v = 1.0 + x.x() - 2.0 * x.y();
      if (k >= 1) v += x.x() * x.y() - x.y() * x.y();
      if (k >= 2) v += x.x() * x.x() * x.y();
      return v;
    };
    const double h = 1e-6;
    const VectorField q = [&](const Vec2& x) {
      return Vec2(-(u(x + Vec2(h, 0)) - u(x - Vec2(h, 0))) / (2 * h) / c,
                  -(u(x + Vec2(0, h)) - u(x - Vec2(0, h))) / (2 * h) / c);
    };
    const ProjectedField qh = l2_project_element(q, m, k);
    const ProjectedField uh = l2_project_element(u, m, k);
    const Postprocessor post(m, k, [c](const Vec2&) { return c; });
    const ProjectedField us = post.apply(qh, uh);
    CHECK(us.degree == k + 1);
    CHECK(l2_error(us, u, m) < 1e-8);
  }
}

TEST_CASE("constant state reconstructs to the constant") {
  const Mesh m = build_uniform_square_mesh(2);
  const int k = 1;
  const ProjectedField q = zero_field(m, k, 2);
  const ProjectedField u = l2_project_element([](const Vec2&) { return 3.25; }, m, k);
  const Postprocessor post(m, k, c_quad);
  CHECK(l2_error(post.apply(q, u), [](const Vec2&) { return 3.25; }, m) < 1e-13);
}

TEST_CASE("reconstruction is local and linear") {
  const Mesh m = build_uniform_square_mesh(3);
  const int k = 1;
  std::mt19937 rng(17);
  std::normal_distribution<double> N;
  ProjectedField q = zero_field(m, k, 2), u = zero_field(m, k, 1);
  for (int i = 0; i < q.coeffs.size(); ++i) q.coeffs.data()[i] = N(rng);
  for (int i = 0; i < u.coeffs.size(); ++i) u.coeffs.data()[i] = N(rng);
  const Postprocessor post(m, k, c_quad);
  const ProjectedField a = post.apply(q, u);

  ProjectedField q2 = q;
  q2.coeffs.col(4).setConstant(9.0);
  const ProjectedField b = post.apply(q2, u);
  for (int e = 0; e < m.num_elements(); ++e) {
    if (e == 4)
      CHECK((a.coeffs.col(e) - b.coeffs.col(e)).norm() > 1e-6);
    else
      CHECK((a.coeffs.col(e) - b.coeffs.col(e)).norm() == 0.0);
  }

  ProjectedField q3 = q, u3 = u;
  q3.coeffs *= 2.0;
  u3.coeffs *= 2.0;
  CHECK((post.apply(q3, u3).coeffs - 2.0 * a.coeffs).cwiseAbs().maxCoeff() < 1e-12);

  // precomputed maps agree with the direct element solve
  const TriangleRule rule = triangle_quadrature(2 * k + 2);
  for (int e = 0; e < m.num_elements(); e += 3) {
    const ElementGeometry g = element_geometry(m, e);
    const Eigen::VectorXd d = postprocess_element(q.coeffs.col(e), u.coeffs.col(e), samples(c_quad, rule, g), rule, g, k, e);
    CHECK((d - a.coeffs.col(e)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reconstruction validates its inputs") {
  const Mesh m = build_uniform_square_mesh(1);
  const ElementGeometry g = element_geometry(m, 0);
  const TriangleRule rule = triangle_quadrature(4);
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(rule.size());
  CHECK_THROWS_AS(postprocess_element(Eigen::VectorXd::Zero(5), Eigen::VectorXd::Zero(3), c, rule, g, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(postprocess_element(Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(3), c, rule, g, -1),
                  std::invalid_argument);
  const Postprocessor post(m, 1, c_quad);
  CHECK_THROWS_AS(post.apply(zero_field(m, 2, 2), zero_field(m, 1, 1)), std::invalid_argument);
}
