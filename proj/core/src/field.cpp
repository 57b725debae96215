#include "newtonflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace newtonflow {
namespace {

void require_point(const ProblemDef& problem, const Vector& x) {
  if (x.size() != problem.dim()) {
    throw std::invalid_argument("point has dimension " + std::to_string(x.size()) + ", problem '" +
                                problem.name() + "' expects " + std::to_string(problem.dim()));
  }
}

}  // namespace

bool Box::contains(const Vector& x) const {
  if (x.size() != axes.size()) return false;
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (x[i] < axes[i].lo || x[i] > axes[i].hi) return false;
  return true;
}

ProblemDef::ProblemDef(std::string name, std::size_t dim, ResidualFn residual, JacobianFn jacobian, Box domain,
                       std::vector<Vector> known_roots)
    : name_(std::move(name)),
      dim_(dim),
      residual_(std::move(residual)),
      jacobian_(std::move(jacobian)),
      domain_(std::move(domain)),
      known_roots_(std::move(known_roots)) {
  if (dim_ == 0) throw std::invalid_argument("problem dimension must be positive");
  if (!residual_) throw std::invalid_argument("problem requires a residual evaluator");
  if (domain_.dim() != dim_) throw std::invalid_argument("domain box dimension does not match the problem");
  for (const auto& axis : domain_.axes)
    if (!(axis.lo < axis.hi)) throw std::invalid_argument("domain box axis must satisfy lo < hi");
  for (const auto& root : known_roots_)
    if (root.size() != dim_) throw std::invalid_argument("known root dimension does not match the problem");
}

Vector eval_f(const ProblemDef& problem, const Vector& x) {
  require_point(problem, x);
  Vector out = problem.residual()(x);
  if (out.size() != problem.dim()) throw std::logic_error("residual evaluator returned the wrong dimension");
  return out;
}

Matrix eval_jacobian(const ProblemDef& problem, const Vector& x) {
  require_point(problem, x);
  if (!problem.has_jacobian()) return finite_difference_jacobian(problem, x);
  Matrix out = problem.jacobian()(x);
  if (out.rows() != problem.dim() || out.cols() != problem.dim()) {
    throw std::logic_error("jacobian evaluator returned the wrong shape");
  }
  return out;
}

Matrix finite_difference_jacobian(const ProblemDef& problem, const Vector& x, std::optional<double> h) {
  require_point(problem, x);
  const double scale = h.value_or(std::sqrt(std::numeric_limits<double>::epsilon()));
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("finite-difference step must be positive");

  const std::size_t n = problem.dim();
  Matrix::Storage data(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = scale * std::max(1.0, std::abs(x[j]));
    const double hi = x[j] + step;
    const double lo = x[j] - step;
    const Vector forward = eval_f(problem, x.with(j, hi));
    const Vector backward = eval_f(problem, x.with(j, lo));
    // Divide by the spacing actually represented, not by 2 * step.
    for (std::size_t i = 0; i < n; ++i) data[i * n + j] = (forward[i] - backward[i]) / (hi - lo);
  }
  return Matrix(n, n, std::move(data));
}

Preconditioner Preconditioner::neg_identity() { return Preconditioner(PreconditionerKind::NegIdentity); }

Preconditioner Preconditioner::newton_inverse() { return Preconditioner(PreconditionerKind::NewtonInverse); }

Preconditioner Preconditioner::frozen_newton(const ProblemDef& problem, const Vector& anchor) {
  Preconditioner out(PreconditionerKind::FrozenNewton);
  out.frozen_ = std::make_shared<const LuFactorization>(eval_jacobian(problem, anchor));
  out.anchor_ = anchor;
  return out;
}

Vector Preconditioner::apply(const ProblemDef& problem, const Vector& x, const Vector& residual) const {
  switch (kind_) {
    case PreconditionerKind::NegIdentity:
      return -residual;
    case PreconditionerKind::NewtonInverse:
      return -solve_linear(eval_jacobian(problem, x), residual);
    case PreconditionerKind::FrozenNewton:
      return -frozen_->solve(residual);
  }
  throw std::logic_error("unknown preconditioner kind");
}

FieldSample eval_field_sample(const ProblemDef& problem, const Preconditioner& precond, const Vector& x) {
  Vector residual = eval_f(problem, x);
  Vector field = precond.apply(problem, x, residual);
  return {std::move(residual), std::move(field)};
}

Vector eval_field(const ProblemDef& problem, const Preconditioner& precond, const Vector& x) {
  return eval_field_sample(problem, precond, x).field;
}

std::optional<std::size_t> match_root(std::span<const Vector> roots, const Vector& x, double tolerance) {
  std::optional<std::size_t> best;
  double best_distance = tolerance;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (roots[i].size() != x.size()) continue;
    const double d = distance(roots[i], x);
    if (best ? d < best_distance : d <= best_distance) {
      best = i;
      best_distance = d;
    }
  }
  return best;
}

}  // namespace newtonflow
