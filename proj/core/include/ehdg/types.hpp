#pragma once

#include <functional>

#include <Eigen/Core>

namespace ehdg {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Fields of space only.
using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

// Fields of space and time, evaluated as f(x, t).
using SpaceTimeScalar = std::function<double(const Vec2&, double)>;
using SpaceTimeVector = std::function<Vec2(const Vec2&, double)>;

}  // namespace ehdg
