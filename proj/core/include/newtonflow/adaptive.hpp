#pragma once

#include <cstddef>
#include <stdexcept>

#include "newtonflow/field.hpp"
#include "newtonflow/linalg.hpp"
#include "newtonflow/outcome.hpp"

namespace newtonflow {

/// Thrown by project() when the target direction is numerically zero.
class ZeroDirectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by adaptive_step() when no acceptable step exists above t_lower.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(SolveStatus status, const char* what) : std::runtime_error(what), status_(status) {}
  [[nodiscard]] SolveStatus status() const noexcept { return status_; }

 private:
  SolveStatus status_;
};

inline constexpr double kZeroDirectionNorm = 1e-30;

/// First step size min(1, sqrt(2 tau / ||F(x0)||)); 1 when the field vanishes.
[[nodiscard]] double initial_step(double field_norm, double tau);

/// Orthogonal projection of u onto the line spanned by v.
[[nodiscard]] Vector project(const Vector& u, const Vector& v);

/// Error indicator ||v/2 - proj_v(F0)|| with v = F0 + F1.
[[nodiscard]] double gamma(const Vector& field0, const Vector& field1);

struct AdaptiveStep {
  Vector x_new;
  double gamma = 0.0;
  double t = 0.0;
  std::size_t rejections = 0;
  std::size_t field_evaluations = 0;
};

/// Inner step-size loop: halve t until t*gamma <= tau, then take the projected
/// update x0 + t*proj_v(F0).
///
/// A trial point where the field cannot be evaluated (singular Jacobian,
/// overflow, or F1 = -F0) counts as a rejection. Throws StepFailure once t
/// drops below t_lower; the status is StepUnderflow unless the last rejection
/// was such a trial failure, in which case it names that failure.
[[nodiscard]] AdaptiveStep adaptive_step(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                                         const Vector& field0, double t, const SolverConfig& config);

[[nodiscard]] AdaptiveStep adaptive_step(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                                         double t, const SolverConfig& config);

/// Adaptive Newton-like iteration with projection-based step-size control.
/// Never throws for solver failures; they are reported through the status.
[[nodiscard]] SolveOutcome solve_adaptive(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                                          const SolverConfig& config = {});

}  // namespace newtonflow
