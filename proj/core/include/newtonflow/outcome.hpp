#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "newtonflow/linalg.hpp"

namespace newtonflow {

/// Tolerances and limits shared by the discrete solvers.
struct SolverConfig {
  double tau = 0.01;            // error-indicator tolerance
  double eps = 1e-8;            // stop once ||F(x)|| <= eps
  double t_lower = 1e-9;        // smallest admissible step
  std::size_t n_max = 100;      // outer iterations
  double reduce_factor = 0.5;   // R(t) = reduce_factor * t

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class SolveStatus { Converged, StepUnderflow, SingularJacobian, MaxIterations, NonFinite };

[[nodiscard]] std::string_view to_string(SolveStatus status) noexcept;

/// One accepted step. `x` is the iterate after the step; the norms are taken there.
struct StepRecord {
  Vector x;
  double t = 0.0;
  double gamma = 0.0;
  double field_norm = 0.0;
  double residual_norm = 0.0;
  std::size_t rejections = 0;
};

using IterationTrace = std::vector<StepRecord>;

struct SolveOutcome {
  SolveStatus status = SolveStatus::MaxIterations;
  Vector final_iterate;
  std::optional<std::size_t> root_index;
  IterationTrace trace;
  // NaN when the start could not be evaluated.
  double initial_field_norm = std::numeric_limits<double>::quiet_NaN();
  double initial_residual_norm = std::numeric_limits<double>::quiet_NaN();
  std::size_t field_evaluations = 0;

  [[nodiscard]] bool converged() const noexcept { return status == SolveStatus::Converged; }
  [[nodiscard]] std::size_t iterations() const noexcept { return trace.size(); }
};

}  // namespace newtonflow
