#include "newtonflow/classical.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace newtonflow {

SolveOutcome solve_fixed_step(const ProblemDef& problem, const Preconditioner& precond, const Vector& x0,
                              double t_fixed, const SolverConfig& config) {
  if (!(t_fixed > 0.0 && t_fixed <= 1.0)) throw std::invalid_argument("fixed step must lie in (0, 1]");
  config.validate();
  if (x0.size() != problem.dim()) throw std::invalid_argument("initial point does not match the problem dimension");

  SolveOutcome out;
  out.final_iterate = x0;
  bool first = true;
  while (true) {
    FieldSample sample;
    try {
      sample = eval_field_sample(problem, precond, out.final_iterate);
    } catch (const SingularMatrixError&) {
      out.status = SolveStatus::SingularJacobian;
      return out;
    } catch (const NonFiniteError&) {
      out.status = SolveStatus::NonFinite;
      return out;
    }
    ++out.field_evaluations;
    const double field_norm = sample.field.norm();
    if (first) {
      out.initial_field_norm = field_norm;
      out.initial_residual_norm = sample.residual.norm();
      first = false;
    } else {
      out.trace.back().field_norm = field_norm;
      out.trace.back().residual_norm = sample.residual.norm();
    }

    if (field_norm <= config.eps) {
      out.status = SolveStatus::Converged;
      out.root_index = match_root(problem.known_roots(), out.final_iterate);
      return out;
    }
    if (out.trace.size() >= config.n_max) {
      out.status = SolveStatus::MaxIterations;
      return out;
    }
    try {
      out.final_iterate = axpy(out.final_iterate, t_fixed, sample.field);
    } catch (const NonFiniteError&) {
      out.status = SolveStatus::NonFinite;
      return out;
    }
    // Norms are filled in by the next evaluation; NaN marks an iterate where it failed.
    constexpr double kPending = std::numeric_limits<double>::quiet_NaN();
    out.trace.push_back(StepRecord{out.final_iterate, t_fixed, 0.0, kPending, kPending, 0});
  }
}

namespace {

struct FlowBreakdown {
  TrajectoryStatus status;
};

Vector newton_field(const ProblemDef& problem, const Vector& x) {
  try {
    return eval_field(problem, Preconditioner::newton_inverse(), x);
  } catch (const SingularMatrixError&) {
    throw FlowBreakdown{TrajectoryStatus::SingularJacobian};
  } catch (const NonFiniteError&) {
    throw FlowBreakdown{TrajectoryStatus::NonFinite};
  }
}

Vector rk4_step(const ProblemDef& problem, const Vector& x, const Vector& k1, double h) {
  try {
    const Vector k2 = newton_field(problem, axpy(x, 0.5 * h, k1));
    const Vector k3 = newton_field(problem, axpy(x, 0.5 * h, k2));
    const Vector k4 = newton_field(problem, axpy(x, h, k3));
    Vector::Storage next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      next[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return Vector(std::move(next));
  } catch (const NonFiniteError&) {
    throw FlowBreakdown{TrajectoryStatus::NonFinite};
  }
}

}  // namespace

Trajectory integrate_reference(const ProblemDef& problem, const Vector& x0, const ReferenceOptions& options) {
  if (!(options.dt > 0.0 && options.dt <= 1e-2)) throw std::invalid_argument("reference step must lie in (0, 1e-2]");
  if (!(options.t_end > 0.0)) throw std::invalid_argument("reference horizon must be positive");
  if (x0.size() != problem.dim()) throw std::invalid_argument("initial point does not match the problem dimension");

  Trajectory traj;
  traj.samples.push_back({0.0, x0});

  const auto steps = static_cast<std::size_t>(std::ceil(options.t_end / options.dt - 1e-9));
  const double h = options.t_end / static_cast<double>(steps);

  Vector x = x0;
  double time = 0.0;
  try {
    FieldSample current = eval_field_sample(problem, Preconditioner::newton_inverse(), x0);
    const double initial_residual = current.residual.norm();
    for (std::size_t k = 0; k < steps; ++k) {
      if (current.field.norm() <= options.eps) {
        traj.status = TrajectoryStatus::Converged;
        break;
      }
      x = rk4_step(problem, x, current.field, h);
      time = static_cast<double>(k + 1) * h;
      current = eval_field_sample(problem, Preconditioner::newton_inverse(), x);

      const double expected = initial_residual * std::exp(-time);
      if (std::abs(current.residual.norm() - expected) > options.breakdown_tolerance * expected) {
        traj.status = TrajectoryStatus::SingularJacobian;
        traj.samples.push_back({time, x});
        return traj;
      }
      const bool last = k + 1 == steps;
      if (!last && options.sample_stride != 0 && (k + 1) % options.sample_stride == 0) {
        traj.samples.push_back({time, x});
      }
    }
  } catch (const FlowBreakdown& breakdown) {
    traj.status = breakdown.status;
  } catch (const SingularMatrixError&) {
    traj.status = TrajectoryStatus::SingularJacobian;
  } catch (const NonFiniteError&) {
    traj.status = TrajectoryStatus::NonFinite;
  }
  if (time > traj.samples.back().time) traj.samples.push_back({time, x});
  return traj;
}

std::optional<std::size_t> attractor_oracle(const ProblemDef& problem, const Vector& x0, const OracleConfig& config) {
  if (problem.known_roots().empty()) throw std::invalid_argument("attractor oracle requires known roots");
  ReferenceOptions options;
  options.dt = config.dt;
  options.t_end = config.t_end;
  options.eps = config.eps;
  options.sample_stride = 0;
  const Trajectory traj = integrate_reference(problem, x0, options);
  if (traj.status == TrajectoryStatus::SingularJacobian || traj.status == TrajectoryStatus::NonFinite) {
    return std::nullopt;
  }
  return match_root(problem.known_roots(), traj.back().x, config.match_tolerance);
}

}  // namespace newtonflow
