#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "newtonflow/field.hpp"

namespace newtonflow {

/// Built-in two-dimensional benchmark systems.
///   Cubic      z^3 - 1 in real form on [-3, 3]^2, three roots, J_f singular at the origin.
///   ExpSin     (exp(x^2 + y^2) - 3, x + y - sin(3(x + y))) on [-1.5, 1.5]^2, six roots.
///   UniqueRoot (-x^2 + y + 3, -xy - x + 4) on [-10, 10]^2, single root (2, 1).
enum class BuiltinId { Cubic, ExpSin, UniqueRoot };

inline constexpr BuiltinId kAllBuiltins[] = {BuiltinId::Cubic, BuiltinId::ExpSin, BuiltinId::UniqueRoot};

[[nodiscard]] std::string_view to_string(BuiltinId id) noexcept;
/// Accepts "cubic", "expsin", "uniqueroot" (also "unique").
[[nodiscard]] std::optional<BuiltinId> parse_builtin(std::string_view name) noexcept;

/// Shared immutable definition; known roots are checked against ||f(r)|| <= 1e-10 on first use.
[[nodiscard]] const ProblemDef& builtin_problem(BuiltinId id);

struct SingularSetDistance {
  double value = 0.0;
  /// True when `value` is |det J_f(x)| rather than a Euclidean distance.
  bool is_proxy = false;
};

/// Euclidean distance to the singular set of J_f for Cubic ({0}) and ExpSin
/// ({y = x} and the lines x + y = +-arccos(1/3)/3 + 2 pi k / 3); |det J_f| for UniqueRoot.
[[nodiscard]] SingularSetDistance singular_set_distance(BuiltinId id, const Vector& x);

}  // namespace newtonflow
