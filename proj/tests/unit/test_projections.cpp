#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ehdg/projections.hpp"

using namespace ehdg;

namespace {

double cubic(const Vec2& x) { return 1.0 + 2.0 * x.x() - x.y() + x.x() * x.y() * x.y() - 0.5 * std::pow(x.x(), 3); }
double smooth(const Vec2& x) { return std::sin(M_PI * x.x()) * std::sin(M_PI * x.y()); }
Vec2 smooth_grad(const Vec2& x) {
  return M_PI * Vec2(std::cos(M_PI * x.x()) * std::sin(M_PI * x.y()),
                     std::sin(M_PI * x.x()) * std::cos(M_PI * x.y()));
}

}  // namespace

TEST_CASE("element projection reproduces polynomials of its degree") {
  const Mesh m = build_uniform_square_mesh(3);
  for (int d = 3; d <= 5; ++d) {
    const ProjectedField p = l2_project_element(cubic, m, d);
    CHECK(l2_error(p, cubic, m) < 1e-12);
    for (int e = 0; e < m.num_elements(); e += 5) {
      const ElementGeometry g = element_geometry(m, e);
      const Vec2 r(0.3, 0.25);
      CHECK(p.value(m, e, r) == doctest::Approx(cubic(g.map(r))).epsilon(1e-12));
    }
  }
  const VectorField vf = [](const Vec2& x) { return Vec2(x.x() * x.y(), 1.0 - x.y() * x.y()); };
  const ProjectedField pv = l2_project_element(vf, m, 2);
  CHECK(pv.components == 2);
  CHECK(l2_error(pv, vf, m) < 1e-12);
}

TEST_CASE("element projection converges at order degree+1") {
  for (int d = 0; d <= 3; ++d) {
    double prev = 0.0;
    for (int n : {4, 8, 16}) {
      const Mesh m = build_uniform_square_mesh(n);
      const double err = l2_error(l2_project_element(smooth, m, d), smooth, m);
      if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(d + 1).epsilon(0.1));
      prev = err;
    }
  }
}

TEST_CASE("field norms agree with the coefficient representation") {
  const Mesh m = build_uniform_square_mesh(4);
  const ProjectedField p = l2_project_element(smooth, m, 2);
  const ScalarField pf = [&](const Vec2&) { return 0.0; };
  CHECK(l2_error(p, pf, m) == doctest::Approx(l2_norm(p, m)).epsilon(1e-12));
  // the physical mass matrix is det * I
  double s = 0.0;
  for (int e = 0; e < m.num_elements(); ++e) s += 2.0 * m.element_area(e) * p.coeffs.col(e).squaredNorm();
  CHECK(std::sqrt(s) == doctest::Approx(l2_norm(p, m)).epsilon(1e-12));
}

TEST_CASE("face projection reproduces polynomials and converges") {
  const Mesh m = build_uniform_square_mesh(4);
  const ScalarField quad = [](const Vec2& x) { return x.x() * x.x() - 3.0 * x.x() * x.y() + x.y(); };
  CHECK(face_l2_error(l2_project_face(quad, m, 2), quad, m) < 1e-12);
  for (int d = 0; d <= 2; ++d) {
    const Mesh a = build_uniform_square_mesh(8), b = build_uniform_square_mesh(16);
    const double ea = face_l2_error(l2_project_face(smooth, a, d), smooth, a);
    const double eb = face_l2_error(l2_project_face(smooth, b, d), smooth, b);
    // face norm over dK scales like h^{d+1/2}
    CHECK(std::log2(ea / eb) == doctest::Approx(d + 0.5).epsilon(0.1));
  }
}

TEST_CASE("HDG projection reproduces polynomial pairs") {
  const Mesh m = build_uniform_square_mesh(3);
  const VectorField beta = [](const Vec2&) { return Vec2(0.7, -0.4); };
  const std::vector<double> tau(m.num_elements(), 2.0);
  for (int k = 0; k <= 2; ++k) {
    // u in P^k, q in [P^k]^2
    const ScalarField u = [k](const Vec2& x) { return k == 0 ? 2.0 : 1.0 + x.x() + (k > 1 ? x.x() * x.y() : 0.0); };
    const VectorField q = [k](const Vec2& x) {
      return k == 0 ? Vec2(1.0, -1.0) : Vec2(x.y(), 2.0 - x.x() + (k > 1 ? x.y() * x.y() : 0.0));
    };
    const HdgProjection p = hdg_project(q, u, m, beta, tau, k);
    CHECK(l2_error(p.u, u, m) < 1e-11);
    CHECK(l2_error(p.q, q, m) < 1e-11);
  }
}

TEST_CASE("HDG projection converges at order k+1") {
  const VectorField beta = [](const Vec2& x) { return Vec2(x.y(), -x.x()); };
  const VectorField q = [](const Vec2& x) { return Vec2(-smooth_grad(x)); };
  for (int k = 0; k <= 2; ++k) {
    double pu = 0.0, pq = 0.0;
    for (int n : {4, 8, 16}) {
      const Mesh m = build_uniform_square_mesh(n);
      const HdgProjection p = hdg_project(q, smooth, m, beta, std::vector<double>(m.num_elements(), 2.0), k);
      const double eu = l2_error(p.u, smooth, m), eq = l2_error(p.q, q, m);
      if (pu > 0.0) {
        CHECK(std::log2(pu / eu) == doctest::Approx(k + 1).epsilon(0.12));
        CHECK(std::log2(pq / eq) == doctest::Approx(k + 1).epsilon(0.12));
      }
      pu = eu;
      pq = eq;
    }
  }
}

TEST_CASE("HDG projection rejects non-positive stabilization") {
  const Mesh m = build_uniform_square_mesh(1);
  const VectorField zero = [](const Vec2&) { return Vec2(0.0, 0.0); };
  CHECK_THROWS_AS(hdg_project(zero, smooth, m, zero, {1.0, 0.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(hdg_project(zero, smooth, m, zero, {1.0}, 1), std::invalid_argument);
}
