#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "newtonflow/field.hpp"
#include "newtonflow/linalg.hpp"
#include "newtonflow/outcome.hpp"

namespace newtonflow {

/// Damped iteration x_{n+1} = x_n + t_fixed F(x_n). t_fixed = 1 is classical Newton
/// when `precond` is the Newton inverse. Only eps and n_max of `config` are used.
[[nodiscard]] SolveOutcome solve_fixed_step(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                                            double t_fixed, const SolverConfig& config = {});

enum class TrajectoryStatus {
  Completed,         // reached t_end
  Converged,         // ||F|| <= eps before t_end
  SingularJacobian,  // ran into the singular set of J_f
  NonFinite,
};

struct TrajectorySample {
  double time = 0.0;
  Vector x;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TrajectoryStatus status = TrajectoryStatus::Completed;

  [[nodiscard]] const TrajectorySample& back() const { return samples.back(); }
};

struct ReferenceOptions {
  double dt = 1e-2;
  double t_end = 40.0;
  double eps = 1e-8;
  /// Keep every stride-th step; 0 keeps only the first and last sample.
  std::size_t sample_stride = 1;
  /// Relative deviation from ||f(x0)|| e^{-t} at which the trajectory is
  /// declared to have hit the singular set.
  double breakdown_tolerance = 0.1;
};

/// Classical fourth-order Runge-Kutta integration of the continuous Newton flow
/// x' = -J_f(x)^{-1} f(x) with a fixed step (the last step is shortened to land
/// on t_end exactly).
///
/// Near the singular set the field blows up and a fixed-step integrator jumps
/// across it. The flow satisfies ||f(x(t))|| = ||f(x0)|| e^{-t} exactly, so a
/// deviation beyond `breakdown_tolerance` is treated as reaching the singular
/// set, the same as a singular Jacobian at a stage point.
[[nodiscard]] Trajectory integrate_reference(const ProblemDef& problem, const Vector& x0,
                                             const ReferenceOptions& options = {});

struct OracleConfig {
  double dt = 1e-2;
  double t_end = 40.0;
  double eps = 1e-8;
  double match_tolerance = kRootMatchTolerance;
};

/// Root whose exact basin of attraction (under the continuous Newton flow)
/// contains x0; nullopt when the flow ends on the singular set or nowhere near
/// a known root.
[[nodiscard]] std::optional<std::size_t> attractor_oracle(const ProblemDef& problem, const Vector& x0,
                                                          const OracleConfig& config = {});

}  // namespace newtonflow
