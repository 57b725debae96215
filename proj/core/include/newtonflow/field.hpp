#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newtonflow/linalg.hpp"

namespace newtonflow {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Axis-aligned box. Scopes initial-value sampling only; evaluators are total.
struct Box {
  std::vector<Interval> axes;

  [[nodiscard]] std::size_t dim() const noexcept { return axes.size(); }
  [[nodiscard]] bool contains(const Vector& x) const;
};

using ResidualFn = std::function<Vector(const Vector&)>;
/// Row i of the returned matrix is the gradient of residual component i.
using JacobianFn = std::function<Matrix(const Vector&)>;

/// A square nonlinear system f(x) = 0 together with its sampling box and known roots.
class ProblemDef {
 public:
  /// `jacobian` may be empty, in which case central differences are used.
  ProblemDef(std::string name, std::size_t dim, ResidualFn residual, JacobianFn jacobian, Box domain,
             std::vector<Vector> known_roots);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] bool has_jacobian() const noexcept { return static_cast<bool>(jacobian_); }
  [[nodiscard]] const Box& domain() const noexcept { return domain_; }
  [[nodiscard]] const std::vector<Vector>& known_roots() const noexcept { return known_roots_; }

  [[nodiscard]] const ResidualFn& residual() const noexcept { return residual_; }
  [[nodiscard]] const JacobianFn& jacobian() const noexcept { return jacobian_; }

 private:
  std::string name_;
  std::size_t dim_;
  ResidualFn residual_;
  JacobianFn jacobian_;
  Box domain_;
  std::vector<Vector> known_roots_;
};

[[nodiscard]] Vector eval_f(const ProblemDef& problem, const Vector& x);

/// Analytic Jacobian when the problem supplies one, central differences otherwise.
[[nodiscard]] Matrix eval_jacobian(const ProblemDef& problem, const Vector& x);

/// Central-difference Jacobian. Column j uses the step h*max(1, |x_j|);
/// h defaults to sqrt(machine epsilon).
[[nodiscard]] Matrix finite_difference_jacobian(const ProblemDef& problem, const Vector& x,
                                                std::optional<double> h = std::nullopt);

enum class PreconditionerKind {
  NegIdentity,    // A(x) = -Id (Picard)
  NewtonInverse,  // A(x) = -J_f(x)^{-1}
  FrozenNewton,   // A(x) = -J_f(anchor)^{-1}
};

/// The matrix A(x) turning the residual f into the vector field F(x) = A(x) f(x).
///
/// Immutable. A frozen-Newton preconditioner factors J_f(anchor) once at
/// construction and shares the factorization between copies.
class Preconditioner {
 public:
  static Preconditioner neg_identity();
  static Preconditioner newton_inverse();
  static Preconditioner frozen_newton(const ProblemDef& problem, const Vector& anchor);

  [[nodiscard]] PreconditionerKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::optional<Vector>& anchor() const noexcept { return anchor_; }

  /// Applies A(x) to a residual already evaluated at x.
  [[nodiscard]] Vector apply(const ProblemDef& problem, const Vector& x, const Vector& residual) const;

 private:
  explicit Preconditioner(PreconditionerKind kind) : kind_(kind) {}

  PreconditionerKind kind_;
  std::optional<Vector> anchor_;
  std::shared_ptr<const LuFactorization> frozen_;
};

/// f(x) and F(x) from a single residual evaluation.
struct FieldSample {
  Vector residual;
  Vector field;
};

[[nodiscard]] FieldSample eval_field_sample(const ProblemDef& problem, const Preconditioner& precond,
                                            const Vector& x);

/// F(x) = A(x) f(x). Throws SingularMatrixError or NonFiniteError.
[[nodiscard]] Vector eval_field(const ProblemDef& problem, const Preconditioner& precond, const Vector& x);

/// Euclidean distance under which an iterate is attributed to a known root.
inline constexpr double kRootMatchTolerance = 1e-4;

/// Index of the nearest known root within `tolerance`, if any; the lower index wins a tie.
[[nodiscard]] std::optional<std::size_t> match_root(std::span<const Vector> roots, const Vector& x,
                                                    double tolerance = kRootMatchTolerance);

}  // namespace newtonflow
