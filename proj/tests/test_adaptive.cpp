#include <doctest.h>

#include <cmath>

#include "newtonflow/adaptive.hpp"
#include "newtonflow/classical.hpp"
#include "newtonflow/problems.hpp"
#include "property_suites.hpp"
#include "support.hpp"

using namespace newtonflow;
using namespace newtonflow::testing;

TEST_CASE("initial step") {
  CHECK(initial_step(2.0, 0.01) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(initial_step(0.02, 0.01) == 1.0);
  CHECK(initial_step(0.001, 0.01) == 1.0);
  CHECK(initial_step(0.0, 0.01) == 1.0);
  CHECK(initial_step(200.0, 0.01) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK_THROWS_AS((void)initial_step(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("projection") {
  CHECK(project(Vector{1.0, 0.0}, Vector{1.0, 1.0}) == Vector{0.5, 0.5});
  const Vector u{0.3, -2.7};
  CHECK(distance(project(u, u), u) <= 1e-15);
  CHECK(project(Vector{1.0, -1.0}, Vector{2.0, 2.0}) == Vector{0.0, 0.0});
  CHECK_THROWS_AS((void)project(Vector{1.0, 0.0}, Vector{0.0, 0.0}), ZeroDirectionError);
  CHECK_THROWS_AS((void)project(Vector{1.0, 0.0}, Vector{1e-31, 0.0}), ZeroDirectionError);
  CHECK_NOTHROW((void)project(Vector{1.0, 0.0}, Vector{1e-29, 0.0}));
}

TEST_CASE("gamma indicator") {
  CHECK(gamma(Vector{0.4, -1.3}, Vector{0.4, -1.3}) == 0.0);
  CHECK(gamma(Vector{1.0, 0.0}, Vector{0.0, 1.0}) == doctest::Approx(0.0));

  // F0 = (1,0), F1 = (0,2) in exact arithmetic: gamma^2 = 9/20, i.e. gamma = (3/10) sqrt(5).
  const Rational f0x = 1, f0y = 0, f1x = 0, f1y = 2;
  const Rational vx = f0x + f1x, vy = f0y + f1y;
  const Rational c = (f0x * vx + f0y * vy) / (vx * vx + vy * vy);
  const Rational dx = vx / 2 - c * vx, dy = vy / 2 - c * vy;
  const Rational g2 = dx * dx + dy * dy;
  CHECK(g2 == Rational(9, 20));
  CHECK(gamma(Vector{1.0, 0.0}, Vector{0.0, 2.0}) == doctest::Approx(std::sqrt(to_double(g2))).epsilon(1e-15));
  CHECK(gamma(Vector{1.0, 0.0}, Vector{0.0, 2.0}) == doctest::Approx(0.3 * std::sqrt(5.0)).epsilon(1e-15));

  CHECK_THROWS_AS((void)gamma(Vector{1.0, 2.0}, Vector{-1.0, -2.0}), ZeroDirectionError);
}

TEST_CASE("adaptive step halves on an affine problem far from its root") {
  // f(x) = x, x0 = (1,0): F0 = (-1,0), F(x0 + t F0) = -(1-t, 0), so gamma = t/2 and
  // t gamma <= 0.01 first holds at t = 1/8 after three halvings.
  const ProblemDef problem = affine_problem(Matrix::identity(2), Vector{0.0, 0.0});
  const AdaptiveStep step = adaptive_step(problem, Preconditioner::newton_inverse(), Vector{1.0, 0.0}, 1.0, {});
  CHECK(step.rejections == 3);
  CHECK(step.t == 0.125);
  CHECK(step.gamma == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(step.x_new[0] == doctest::Approx(0.875).epsilon(1e-15));
  CHECK(step.x_new[1] == 0.0);
  CHECK(step.field_evaluations == 5);

  // At t = 1 the trial point is the root itself and gamma = |F0| / 2.
  SolverConfig loose;
  loose.tau = 0.6;
  const AdaptiveStep full = adaptive_step(problem, Preconditioner::newton_inverse(), Vector{1.0, 0.0}, 1.0, loose);
  CHECK(full.rejections == 0);
  CHECK(full.gamma == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(full.x_new == Vector{0.0, 0.0});
}

TEST_CASE("adaptive step near a regular root takes the full projected step") {
  const ProblemDef& cubic = builtin_problem(BuiltinId::Cubic);
  const Preconditioner newton = Preconditioner::newton_inverse();
  const Vector x0{1.0 + 6e-5, -7e-5};
  const AdaptiveStep step = adaptive_step(cubic, newton, x0, 1.0, {});
  CHECK(step.rejections == 0);
  CHECK(step.t == 1.0);

  // Brute-force replay of the update.
  const Vector f0 = eval_field(cubic, newton, x0);
  const Vector f1 = eval_field(cubic, newton, x0 + f0);
  const Vector v = f0 + f1;
  const Vector expected = x0 + (dot(f0, v) / dot(v, v)) * v;
  CHECK(distance(step.x_new, expected) <= 1e-15);
  CHECK(step.gamma <= 10.0 * distance(x0, Vector{1.0, 0.0}));
  CHECK(distance(step.x_new, Vector{1.0, 0.0}) <= 1e-8);
}

TEST_CASE("adaptive step guards") {
  const ProblemDef& cubic = builtin_problem(BuiltinId::Cubic);
  const Preconditioner newton = Preconditioner::newton_inverse();
  SolverConfig config;
  try {
    (void)adaptive_step(cubic, newton, Vector{2.0, 1.0}, 1e-10, config);
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.status() == SolveStatus::StepUnderflow);
  }
  CHECK_THROWS_AS((void)adaptive_step(cubic, newton, Vector{2.0, 1.0}, 0.0, config), std::invalid_argument);
  CHECK_THROWS_AS((void)adaptive_step(cubic, newton, Vector{2.0, 1.0}, 1.5, config), std::invalid_argument);
  CHECK_THROWS_AS((void)adaptive_step(cubic, newton, Vector{1.0, 0.0}, 1.0, config), std::invalid_argument);
}

TEST_CASE("trial points on the singular set are rejections") {
  // f(x) = x - 1 with a Jacobian that vanishes for x >= 0.75.
  const ProblemDef problem(
      "kinked", 1, [](const Vector& x) { return Vector{x[0] - 1.0}; },
      [](const Vector& x) { return Matrix{{x[0] >= 0.75 ? 0.0 : 1.0}}; }, Box{{{-2.0, 2.0}}}, {Vector{1.0}});
  SolverConfig config;
  config.tau = 1.0;
  const AdaptiveStep step = adaptive_step(problem, Preconditioner::newton_inverse(), Vector{0.0}, 1.0, config);
  CHECK(step.rejections == 1);
  CHECK(step.t == 0.5);
  CHECK(step.gamma == doctest::Approx(0.25));
  CHECK(step.x_new == Vector{0.5});
}

TEST_CASE("underflow after failed trials reports the trial failure") {
  const ProblemDef singular_everywhere(
      "flat", 1, [](const Vector& x) { return Vector{x[0] >= 1.0 ? 1.0 : 0.5}; },
      [](const Vector& x) { return Matrix{{x[0] >= 1.0 ? 1.0 : 0.0}}; }, Box{{{-2.0, 2.0}}}, {});
  try {
    (void)adaptive_step(singular_everywhere, Preconditioner::newton_inverse(), Vector{1.0}, 1.0, {});
    FAIL("expected StepFailure");
  } catch (const StepFailure& e) {
    CHECK(e.status() == SolveStatus::SingularJacobian);
  }
  const SolveOutcome outcome = solve_adaptive(singular_everywhere, Preconditioner::newton_inverse(), Vector{1.0});
  CHECK(outcome.status == SolveStatus::SingularJacobian);
  CHECK(outcome.iterations() == 0);
  CHECK(outcome.final_iterate == Vector{1.0});
}

TEST_CASE("solve_adaptive on the cubic") {
  const ProblemDef& cubic = builtin_problem(BuiltinId::Cubic);
  const Preconditioner newton = Preconditioner::newton_inverse();

  SUBCASE("near (1,0) it coincides with classical Newton") {
    const Vector x0{1.001, 0.0};
    const SolveOutcome adaptive = solve_adaptive(cubic, newton, x0);
    const SolveOutcome classical = solve_fixed_step(cubic, newton, x0, 1.0);
    REQUIRE(adaptive.status == SolveStatus::Converged);
    CHECK(adaptive.root_index == 0u);
    CHECK(adaptive.iterations() <= 4);
    REQUIRE(adaptive.iterations() == classical.iterations());
    for (std::size_t k = 0; k < adaptive.trace.size(); ++k) {
      CHECK(adaptive.trace[k].t == 1.0);
      CHECK(adaptive.trace[k].rejections == 0);
      CHECK(distance(adaptive.trace[k].x, classical.trace[k].x) <= 1e-15);
    }
  }
  SUBCASE("the origin is singular") {
    const SolveOutcome outcome = solve_adaptive(cubic, newton, Vector{0.0, 0.0});
    CHECK((outcome.status == SolveStatus::SingularJacobian || outcome.status == SolveStatus::StepUnderflow));
    CHECK_FALSE(outcome.converged());
    CHECK(std::isnan(outcome.initial_field_norm));
  }
  SUBCASE("starting on a root stops immediately") {
    for (std::size_t r = 0; r < cubic.known_roots().size(); ++r) {
      const SolveOutcome outcome = solve_adaptive(cubic, newton, cubic.known_roots()[r]);
      CHECK(outcome.status == SolveStatus::Converged);
      CHECK(outcome.iterations() == 0);
      CHECK(outcome.root_index == r);
    }
  }
  SUBCASE("the iteration cap") {
    SolverConfig config;
    config.n_max = 2;
    const SolveOutcome outcome = solve_adaptive(cubic, newton, Vector{0.08, 0.55}, config);
    CHECK(outcome.status == SolveStatus::MaxIterations);
    CHECK(outcome.iterations() == 2);
  }
  SUBCASE("an unreachable tolerance underflows") {
    SolverConfig config;
    config.tau = 1e-30;
    const SolveOutcome outcome = solve_adaptive(cubic, newton, Vector{2.0, 1.0}, config);
    CHECK(outcome.status == SolveStatus::StepUnderflow);
  }
  SUBCASE("the trace records both norms") {
    const SolveOutcome outcome = solve_adaptive(cubic, newton, Vector{0.08, 0.55});
    REQUIRE(outcome.converged());
    CHECK(outcome.root_index == 1u);
    CHECK(outcome.initial_residual_norm == doctest::Approx(eval_f(cubic, Vector{0.08, 0.55}).norm()));
    const StepRecord& last = outcome.trace.back();
    CHECK(last.field_norm <= 1e-8);
    CHECK(last.field_norm == doctest::Approx(eval_field(cubic, newton, last.x).norm()));
    CHECK(last.residual_norm == doctest::Approx(eval_f(cubic, last.x).norm()));
    CHECK(outcome.final_iterate == last.x);
    std::size_t evaluations = 1;
    for (const auto& step : outcome.trace) evaluations += step.rejections + 2;
    CHECK(outcome.field_evaluations == evaluations);
  }
}

TEST_CASE("invalid solver configurations are rejected") {
  const ProblemDef& cubic = builtin_problem(BuiltinId::Cubic);
  const Preconditioner newton = Preconditioner::newton_inverse();
  auto with = [](auto edit) {
    SolverConfig c;
    edit(c);
    return c;
  };
  for (const SolverConfig& bad : {with([](SolverConfig& c) { c.tau = 0.0; }),
                                  with([](SolverConfig& c) { c.eps = -1.0; }),
                                  with([](SolverConfig& c) { c.t_lower = 1.0; }),
                                  with([](SolverConfig& c) { c.n_max = 0; }),
                                  with([](SolverConfig& c) { c.reduce_factor = 1.0; })}) {
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS((void)solve_adaptive(cubic, newton, Vector{2.0, 0.0}, bad), std::invalid_argument);
  }
  CHECK_THROWS_AS((void)solve_adaptive(cubic, newton, Vector{2.0}), std::invalid_argument);
}

TEST_CASE("projected update is collinear with F0 + F1") {
  Sampler rng(37);
  const Preconditioner newton = Preconditioner::newton_inverse();
  int checked = 0;
  for (int n = 0; n < 2000; ++n) {
    const BuiltinId id = kAllBuiltins[rng.index(3)];
    const ProblemDef& problem = builtin_problem(id);
    const Vector x0 = rng.point(problem.domain());
    try {
      const Vector f0 = eval_field(problem, newton, x0);
      if (f0.norm() <= 1e-8) continue;
      const AdaptiveStep step = adaptive_step(problem, newton, x0, f0, initial_step(f0.norm(), 0.01), {});
      const Vector f1 = eval_field(problem, newton, x0 + step.t * f0);
      const Vector v = f0 + f1;
      const Vector d = step.x_new - x0;
      if (d.norm() == 0.0) continue;
      const double sine = std::abs(d[0] * v[1] - d[1] * v[0]) / (d.norm() * v.norm());
      CHECK(std::asin(std::min(1.0, sine)) <= 1e-12);
      ++checked;
    } catch (const std::exception&) {
    }
  }
  CHECK(checked >= 1000);
}

TEST_CASE("quadratic convergence near regular roots") {
  Sampler rng(41);
  const Preconditioner newton = Preconditioner::newton_inverse();
  for (BuiltinId id : kAllBuiltins) {
    const ProblemDef& problem = builtin_problem(id);
    for (const Vector& root : problem.known_roots()) {
      for (int n = 0; n < 20; ++n) {
        const Vector x0 = rng.ball(root, 1e-3);
        const SolveOutcome outcome = solve_adaptive(problem, newton, x0);
        REQUIRE(outcome.converged());
        double e_prev = distance(x0, root);
        for (const StepRecord& step : outcome.trace) {
          CHECK(step.t == 1.0);
          const double e = distance(step.x, root);
          if (e_prev > 1e-7) CHECK(e / (e_prev * e_prev) <= 1e2);
          e_prev = e;
        }
      }
    }
  }
}

TEST_CASE("identical inputs give bit-identical traces") {
  Sampler rng(43);
  const Preconditioner newton = Preconditioner::newton_inverse();
  for (int n = 0; n < 200; ++n) {
    const ProblemDef& problem = builtin_problem(kAllBuiltins[rng.index(3)]);
    const Vector x0 = rng.point(problem.domain());
    const SolveOutcome a = solve_adaptive(problem, newton, x0);
    const SolveOutcome b = solve_adaptive(problem, newton, x0);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.status == b.status);
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
      CHECK(a.trace[k].x == b.trace[k].x);
      CHECK(a.trace[k].t == b.trace[k].t);
      CHECK(a.trace[k].gamma == b.trace[k].gamma);
    }
  }
}

TEST_CASE("Picard and frozen preconditioners drive the same loop") {
  const ProblemDef& unique = builtin_problem(BuiltinId::UniqueRoot);
  const Vector x0{2.3, 1.4};
  const SolveOutcome frozen = solve_adaptive(unique, Preconditioner::frozen_newton(unique, x0), x0);
  CHECK(frozen.converged());
  CHECK(frozen.root_index == 0u);

  // f(x) = x - b: the Picard field b - x is the Newton field.
  const ProblemDef shift = affine_problem(Matrix::identity(2), Vector{0.5, -0.25});
  const SolveOutcome picard = solve_adaptive(shift, Preconditioner::neg_identity(), Vector{1.0, 1.0});
  const SolveOutcome newton = solve_adaptive(shift, Preconditioner::newton_inverse(), Vector{1.0, 1.0});
  CHECK(picard.converged());
  CHECK(picard.iterations() == newton.iterations());
}

TEST_CASE("property: projection idempotence and orthogonality") {
  const PropertyResult r = check_projection(101);
  INFO(r.first_failure);
  CHECK(r.cases >= 1000);
  CHECK(r.failures == 0);
}

TEST_CASE("property: gamma vanishes exactly for fields of equal length") {
  const PropertyResult r = check_gamma(102);
  INFO(r.first_failure);
  CHECK(r.cases >= 1000);
  CHECK(r.failures == 0);
}

TEST_CASE("property: accepted steps satisfy t gamma <= tau") {
  const PropertyResult r = check_step_contract(103);
  INFO(r.first_failure);
  CHECK(r.cases >= 1000);
  CHECK(r.failures == 0);
}
