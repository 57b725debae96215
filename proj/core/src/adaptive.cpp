#include "newtonflow/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace newtonflow {

double initial_step(double field_norm, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (field_norm <= 0.0) return 1.0;
  return std::min(1.0, std::sqrt(2.0 * tau / field_norm));
}

Vector project(const Vector& u, const Vector& v) {
  const double vv = dot(v, v);
  if (std::sqrt(vv) <= kZeroDirectionNorm) throw ZeroDirectionError("projection onto a zero direction");
  return (dot(u, v) / vv) * v;
}

double gamma(const Vector& field0, const Vector& field1) {
  const Vector v = field0 + field1;
  return (0.5 * v - project(field0, v)).norm();
}

AdaptiveStep adaptive_step(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                           const Vector& field0, double t, const SolverConfig& config) {
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("step size must lie in (0, 1]");
  if (field0.norm() <= config.eps) throw std::invalid_argument("adaptive step requested at a converged iterate");

  AdaptiveStep step;
  std::optional<SolveStatus> trial_failure;
  while (true) {
    if (t < config.t_lower) {
      throw StepFailure(trial_failure.value_or(SolveStatus::StepUnderflow), "step size fell below t_lower");
    }
    try {
      const Vector x1 = axpy(x0, t, field0);
      const Vector field1 = eval_field(problem, precond, x1);
      ++step.field_evaluations;
      const Vector v = field0 + field1;
      const Vector projected = project(field0, v);
      const double g = (0.5 * v - projected).norm();
      if (t * g <= config.tau) {
        step.x_new = axpy(x0, t, projected);
        step.gamma = g;
        step.t = t;
        return step;
      }
      trial_failure.reset();
    } catch (const SingularMatrixError&) {
      trial_failure = SolveStatus::SingularJacobian;
    } catch (const NonFiniteError&) {
      trial_failure = SolveStatus::NonFinite;
    } catch (const ZeroDirectionError&) {
      trial_failure.reset();
    }
    t *= config.reduce_factor;
    ++step.rejections;
  }
}

AdaptiveStep adaptive_step(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0, double t,
                           const SolverConfig& config) {
  AdaptiveStep step = adaptive_step(problem, precond, x0, eval_field(problem, precond, x0), t, config);
  ++step.field_evaluations;
  return step;
}

SolveOutcome solve_adaptive(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                            const SolverConfig& config) {
  config.validate();
  if (x0.size() != problem.dim()) throw std::invalid_argument("initial point does not match the problem dimension");

  SolveOutcome out;
  out.final_iterate = x0;

  FieldSample current;
  try {
    current = eval_field_sample(problem, precond, x0);
  } catch (const SingularMatrixError&) {
    out.status = SolveStatus::SingularJacobian;
    return out;
  } catch (const NonFiniteError&) {
    out.status = SolveStatus::NonFinite;
    return out;
  }
  out.field_evaluations = 1;
  double field_norm = current.field.norm();
  out.initial_field_norm = field_norm;
  out.initial_residual_norm = current.residual.norm();

  double t = initial_step(field_norm, config.tau);
  while (true) {
    if (field_norm <= config.eps) {
      out.status = SolveStatus::Converged;
      out.root_index = match_root(problem.known_roots(), out.final_iterate);
      return out;
    }
    if (out.trace.size() >= config.n_max) {
      out.status = SolveStatus::MaxIterations;
      return out;
    }

    AdaptiveStep step;
    try {
      step = adaptive_step(problem, precond, out.final_iterate, current.field, t, config);
    } catch (const StepFailure& failure) {
      out.status = failure.status();
      return out;
    }
    out.field_evaluations += step.field_evaluations;
    out.final_iterate = step.x_new;

    try {
      current = eval_field_sample(problem, precond, out.final_iterate);
    } catch (const SingularMatrixError&) {
      out.status = SolveStatus::SingularJacobian;
      return out;
    } catch (const NonFiniteError&) {
      out.status = SolveStatus::NonFinite;
      return out;
    }
    ++out.field_evaluations;
    field_norm = current.field.norm();

    out.trace.push_back(StepRecord{out.final_iterate, step.t, step.gamma, field_norm, current.residual.norm(),
                                   step.rejections});

    // Predict the next step from the indicator of the step just accepted.
    t = step.gamma > 0.0 ? std::min(1.0, config.tau / step.gamma) : 1.0;
  }
}

}  // namespace newtonflow
