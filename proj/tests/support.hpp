#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include <boost/rational.hpp>

#include "newtonflow/field.hpp"
#include "newtonflow/linalg.hpp"

namespace newtonflow::testing {

using Rational = boost::rational<long long>;

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  Vector point(const Box& box) {
    Vector::Storage values;
    for (const auto& axis : box.axes) values.push_back(uniform(axis.lo, axis.hi));
    return Vector(std::move(values));
  }
  Vector ball(const Vector& centre, double radius) {
    while (true) {
      Vector::Storage offset;
      double sq = 0.0;
      for (std::size_t d = 0; d < centre.size(); ++d) {
        offset.push_back(uniform(-radius, radius));
        sq += offset.back() * offset.back();
      }
      if (sq > 0.0 && sq <= radius * radius) return centre + Vector(std::move(offset));
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// f(x) = M x - b with the exact Jacobian M.
inline ProblemDef affine_problem(const Matrix& m, const Vector& b, bool with_jacobian = true) {
  JacobianFn jac;
  if (with_jacobian) jac = [m](const Vector&) { return m; };
  return ProblemDef("affine", b.size(), [m, b](const Vector& x) { return m * x - b; }, jac,
                    Box{std::vector<Interval>(b.size(), Interval{-5.0, 5.0})}, {solve_linear(m, b)});
}

inline double relative_error(double actual, double expected) {
  return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

}  // namespace newtonflow::testing
