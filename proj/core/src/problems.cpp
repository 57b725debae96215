#include "newtonflow/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace newtonflow {
namespace {

constexpr double kRootResidualBound = 1e-10;

ProblemDef make_cubic() {
  const double h = std::sqrt(3.0) / 2.0;
  return ProblemDef(
      "cubic", 2,
      [](const Vector& p) {
        const double x = p[0], y = p[1];
        return Vector{x * x * x - 3.0 * x * y * y - 1.0, 3.0 * x * x * y - y * y * y};
      },
      [](const Vector& p) {
        const double x = p[0], y = p[1];
        const double re = 3.0 * (x * x - y * y);
        const double im = 6.0 * x * y;
        return Matrix{{re, -im}, {im, re}};
      },
      Box{{{-3.0, 3.0}, {-3.0, 3.0}}}, {Vector{1.0, 0.0}, Vector{-0.5, h}, Vector{-0.5, -h}});
}

ProblemDef make_expsin() {
  // x + y = s with s in {0, +-s1}, s1 = sin(3 s1), intersected with x^2 + y^2 = ln 3.
  const double a = 0.74115190368375553792;
  const double p = 1.0162459636144362145;
  const double q = 0.2566250769224934436;
  return ProblemDef(
      "expsin", 2,
      [](const Vector& v) {
        const double x = v[0], y = v[1];
        const double s = x + y;
        return Vector{std::exp(x * x + y * y) - 3.0, s - std::sin(3.0 * s)};
      },
      [](const Vector& v) {
        const double x = v[0], y = v[1];
        const double e = std::exp(x * x + y * y);
        const double c = 1.0 - 3.0 * std::cos(3.0 * (x + y));
        return Matrix{{2.0 * x * e, 2.0 * y * e}, {c, c}};
      },
      Box{{{-1.5, 1.5}, {-1.5, 1.5}}},
      {Vector{a, -a}, Vector{-a, a}, Vector{p, -q}, Vector{-q, p}, Vector{q, -p}, Vector{-p, q}});
}

ProblemDef make_unique_root() {
  return ProblemDef(
      "uniqueroot", 2,
      [](const Vector& v) {
        const double x = v[0], y = v[1];
        return Vector{-x * x + y + 3.0, -x * y - x + 4.0};
      },
      [](const Vector& v) {
        const double x = v[0], y = v[1];
        return Matrix{{-2.0 * x, 1.0}, {-y - 1.0, -x}};
      },
      Box{{{-10.0, 10.0}, {-10.0, 10.0}}}, {Vector{2.0, 1.0}});
}

ProblemDef checked(ProblemDef problem) {
  for (const auto& root : problem.known_roots()) {
    if (eval_f(problem, root).norm() > kRootResidualBound) {
      throw std::logic_error("built-in problem '" + problem.name() + "' lists an inexact root");
    }
  }
  return problem;
}

double distance_to_line_family(double s, double offset, double period) {
  // Lines x + y = offset + k*period; distance |s - c| / sqrt(2) to the nearest one.
  const double k = std::round((s - offset) / period);
  return std::abs(s - (offset + k * period)) / std::numbers::sqrt2;
}

}  // namespace

std::string_view to_string(BuiltinId id) noexcept {
  switch (id) {
    case BuiltinId::Cubic: return "cubic";
    case BuiltinId::ExpSin: return "expsin";
    case BuiltinId::UniqueRoot: return "uniqueroot";
  }
  return "unknown";
}

std::optional<BuiltinId> parse_builtin(std::string_view name) noexcept {
  if (name == "cubic") return BuiltinId::Cubic;
  if (name == "expsin") return BuiltinId::ExpSin;
  if (name == "uniqueroot" || name == "unique") return BuiltinId::UniqueRoot;
  return std::nullopt;
}

const ProblemDef& builtin_problem(BuiltinId id) {
  static const ProblemDef cubic = checked(make_cubic());
  static const ProblemDef expsin = checked(make_expsin());
  static const ProblemDef unique_root = checked(make_unique_root());
  switch (id) {
    case BuiltinId::Cubic: return cubic;
    case BuiltinId::ExpSin: return expsin;
    case BuiltinId::UniqueRoot: return unique_root;
  }
  throw std::invalid_argument("unknown built-in problem");
}

SingularSetDistance singular_set_distance(BuiltinId id, const Vector& x) {
  if (x.size() != 2) throw std::invalid_argument("built-in problems are two-dimensional");
  switch (id) {
    case BuiltinId::Cubic:
      return {x.norm(), false};
    case BuiltinId::ExpSin: {
      const double diagonal = std::abs(x[0] - x[1]) / std::numbers::sqrt2;
      const double offset = std::acos(1.0 / 3.0) / 3.0;
      const double period = 2.0 * std::numbers::pi / 3.0;
      const double s = x[0] + x[1];
      return {std::min({diagonal, distance_to_line_family(s, offset, period),
                        distance_to_line_family(s, -offset, period)}),
              false};
    }
    case BuiltinId::UniqueRoot:
      return {std::abs(determinant(eval_jacobian(builtin_problem(id), x))), true};
  }
  throw std::invalid_argument("unknown built-in problem");
}

}  // namespace newtonflow
