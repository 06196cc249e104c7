#include "ehdg/examples.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ehdg {

Member manufactured_member(double c, SpaceTimeVector beta, const ExactSolution& exact) {
  Member m;
  m.c = [c](const Vec2&, double) { return c; };
  m.beta = beta;
  m.exact_u = exact.u;
  m.exact_q = [c, grad = exact.grad](const Vec2& x, double t) -> Vec2 { return -grad(x, t) / c; };
  m.f = [c, beta, exact](const Vec2& x, double t) {
    return exact.u_t(x, t) - exact.laplacian(x, t) / c + beta(x, t).dot(exact.grad(x, t));
  };
  m.g = exact.u;
  m.u0 = [u = exact.u](const Vec2& x) { return u(x, 0.0); };
  return m;
}

ProblemSpec example1() {
  constexpr std::array<double, 3> c = {0.26959, 0.26633, 0.30525};
  constexpr std::array<double, 3> b = {1.6797, 1.6551, 1.1626};
  ProblemSpec spec;
  spec.name = "example1";
  spec.final_time = 1.0;
  for (int j = 0; j < 3; ++j) {
    const double s = 1.0 / (j + 1);
    ExactSolution ex;
    ex.u = [s](const Vec2& x, double t) {
      return s * std::sin(t) * std::sin(x.x()) * std::sin(x.y());
    };
    ex.u_t = [s](const Vec2& x, double t) {
      return s * std::cos(t) * std::sin(x.x()) * std::sin(x.y());
    };
    ex.grad = [s](const Vec2& x, double t) -> Vec2 {
      const double a = s * std::sin(t);
      return {a * std::cos(x.x()) * std::sin(x.y()), a * std::sin(x.x()) * std::cos(x.y())};
    };
    ex.laplacian = [s](const Vec2& x, double t) {
      return -2.0 * s * std::sin(t) * std::sin(x.x()) * std::sin(x.y());
    };
    const double bj = b[j], cj = c[j];
    Member m = manufactured_member(
        cj, [bj](const Vec2& x, double) -> Vec2 { return {bj * x.y(), bj * x.x()}; }, ex);
    // same source and flux with the trigonometric factors shared
    m.f = [s, bj, cj](const Vec2& x, double t) {
      const double st = std::sin(t), ct = std::cos(t);
      const double sx = std::sin(x.x()), cx = std::cos(x.x());
      const double sy = std::sin(x.y()), cy = std::cos(x.y());
      return s * ((ct + 2.0 * st / cj) * sx * sy + bj * st * (x.y() * cx * sy + x.x() * sx * cy));
    };
    m.exact_q = [a = s / cj](const Vec2& x, double t) -> Vec2 {
      const double st = std::sin(t);
      return {-a * st * std::cos(x.x()) * std::sin(x.y()), -a * st * std::sin(x.x()) * std::cos(x.y())};
    };
    spec.members.push_back(std::move(m));
  }
  return spec;
}

namespace {

// sin(t) P(x,y) B(x,y) with P = x(1-x)y(1-y) and
// B = 1/2 + atan(2 sqrt(c) (r - (x-a)^2 - (y-b)^2)) / pi.
struct LayerProfile {
  double c, r, a, b;

  struct Values {
    double w;
    Vec2 grad;
    double lap;
  };

  Values eval(const Vec2& x) const {
    const double k = 2.0 * std::sqrt(c);
    const double dx = x.x() - a, dy = x.y() - b;
    const double s = k * (r - dx * dx - dy * dy);
    const double den = 1.0 + s * s;
    const double sx = -2.0 * k * dx, sy = -2.0 * k * dy, sxx = -2.0 * k;
    const double B = 0.5 + std::atan(s) / std::numbers::pi;
    const double Bx = sx / den / std::numbers::pi;
    const double By = sy / den / std::numbers::pi;
    const double Bxx = (sxx / den - 2.0 * s * sx * sx / (den * den)) / std::numbers::pi;
    const double Byy = (sxx / den - 2.0 * s * sy * sy / (den * den)) / std::numbers::pi;
    const double px = x.x() * (1.0 - x.x()), py = x.y() * (1.0 - x.y());
    const double px1 = 1.0 - 2.0 * x.x(), py1 = 1.0 - 2.0 * x.y();
    const double P = px * py;
    Values v;
    v.w = P * B;
    v.grad = {px1 * py * B + P * Bx, px * py1 * B + P * By};
    v.lap = -2.0 * py * B + 2.0 * px1 * py * Bx + P * Bxx - 2.0 * px * B + 2.0 * px * py1 * By +
            P * Byy;
    return v;
  }
};

}  // namespace

ProblemSpec example2() {
  constexpr std::array<double, 3> c = {1e4, 2e4, 3e4};
  const std::array<Vec2, 3> beta = {Vec2(2, 3), Vec2(3, 4), Vec2(4, 5)};
  const std::array<LayerProfile, 3> layer = {LayerProfile{c[0], 1.0 / 12, 1.0 / 3, 0.5},
                                             LayerProfile{c[1], 1.0 / 14, 0.5, 1.0 / 3},
                                             LayerProfile{c[2], 1.0 / 16, 0.5, 0.5}};
  ProblemSpec spec;
  spec.name = "example2";
  spec.final_time = 0.1;
  for (int j = 0; j < 3; ++j) {
    const LayerProfile L = layer[j];
    ExactSolution ex;
    ex.u = [L](const Vec2& x, double t) { return std::sin(t) * L.eval(x).w; };
    ex.u_t = [L](const Vec2& x, double t) { return std::cos(t) * L.eval(x).w; };
    ex.grad = [L](const Vec2& x, double t) -> Vec2 { return std::sin(t) * L.eval(x).grad; };
    ex.laplacian = [L](const Vec2& x, double t) { return std::sin(t) * L.eval(x).lap; };
    const Vec2 b = beta[j];
    const double cj = c[j];
    Member m = manufactured_member(cj, [b](const Vec2&, double) -> Vec2 { return b; }, ex);
    m.f = [L, b, cj](const Vec2& x, double t) {
      const auto v = L.eval(x);
      return std::cos(t) * v.w + std::sin(t) * (-v.lap / cj + b.dot(v.grad));
    };
    spec.members.push_back(std::move(m));
  }
  return spec;
}

ProblemSpec constant_problem(const std::string& name, const std::vector<ConstantMember>& members,
                             double final_time) {
  ProblemSpec spec;
  spec.name = name;
  spec.final_time = final_time;
  for (const auto& cm : members) {
    Member m;
    m.c = [c = cm.c](const Vec2&, double) { return c; };
    m.beta = [b = cm.beta](const Vec2&, double) -> Vec2 { return b; };
    m.f = [f = cm.f](const Vec2&, double) { return f; };
    m.g = [](const Vec2&, double) { return 0.0; };
    m.u0 = [](const Vec2&) { return 0.0; };
    spec.members.push_back(std::move(m));
  }
  return spec;
}

ProblemSpec example3() {
  return constant_problem("example3",
                          {{60.0, Vec2(2, 3), 2.0}, {120.0, Vec2(3, 4), 5.0},
                           {180.0, Vec2(4, 5), 8.0}},
                          0.1);
}

ProblemSpec example(int id) {
  switch (id) {
    case 1: return example1();
    case 2: return example2();
    case 3: return example3();
    default: throw std::invalid_argument("unknown example " + std::to_string(id));
  }
}

}  // namespace ehdg
