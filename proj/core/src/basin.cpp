#include "newtonflow/basin.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "newtonflow/adaptive.hpp"

namespace newtonflow {
namespace {

constexpr std::int32_t failure_to_code(FailureCode code) { return -1 - static_cast<std::int32_t>(code); }

// Calls body(index) for every index in [0, count) across `workers` threads.
void for_each_cell(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) body(k);
    });
  }
}

Preconditioner make_preconditioner(PreconditionerKind kind, const ProblemDef& problem, const Vector& x0) {
  switch (kind) {
    case PreconditionerKind::NegIdentity: return Preconditioner::neg_identity();
    case PreconditionerKind::NewtonInverse: return Preconditioner::newton_inverse();
    case PreconditionerKind::FrozenNewton: return Preconditioner::frozen_newton(problem, x0);
  }
  throw std::invalid_argument("unknown preconditioner kind");
}

CellRecord run_cell(const ProblemDef& problem, const SolverSpec& solver, const Vector& x0,
                    const SolverConfig& config) {
  CellRecord record;
  if (solver.kind == SolverSpec::Kind::Reference) {
    OracleConfig oracle;
    oracle.dt = solver.step;
    oracle.eps = config.eps;
    const auto root = attractor_oracle(problem, x0, oracle);
    record.label = root ? CellLabel::root(*root) : CellLabel::failure(FailureCode::SingularJacobian);
    return record;
  }

  std::optional<Preconditioner> precond;
  try {
    precond = make_preconditioner(solver.preconditioner, problem, x0);
  } catch (const SingularMatrixError&) {
    record.label = CellLabel::failure(FailureCode::SingularJacobian);
    return record;
  } catch (const NonFiniteError&) {
    record.label = CellLabel::failure(FailureCode::NonFinite);
    return record;
  }
  const SolveOutcome outcome = solver.kind == SolverSpec::Kind::Adaptive
                                   ? solve_adaptive(problem, *precond, x0, config)
                                   : solve_fixed_step(problem, *precond, x0, solver.step, config);
  record.label = label_outcome(outcome);
  record.iterations = static_cast<std::uint32_t>(outcome.iterations());
  record.field_evaluations = static_cast<std::uint32_t>(outcome.field_evaluations);
  return record;
}

void require_inside(const Box& outer, const Box& inner) {
  for (std::size_t k = 0; k < inner.dim(); ++k) {
    const double slack = 1e-12 * (outer.axes[k].hi - outer.axes[k].lo);
    if (inner.axes[k].lo < outer.axes[k].lo - slack || inner.axes[k].hi > outer.axes[k].hi + slack) {
      throw std::invalid_argument("grid domain must lie within the problem domain");
    }
  }
}

void validate_for(const ProblemDef& problem, const GridSpec& grid) {
  grid.validate();
  if (problem.dim() != 2) throw std::invalid_argument("basin sampling needs a two-dimensional problem");
  require_inside(problem.domain(), grid.domain);
}

}  // namespace

std::string_view to_string(FailureCode code) noexcept {
  switch (code) {
    case FailureCode::SingularJacobian: return "SingularJacobian";
    case FailureCode::StepUnderflow: return "StepUnderflow";
    case FailureCode::MaxIterations: return "MaxIterations";
    case FailureCode::NonFinite: return "NonFinite";
    case FailureCode::Unmatched: return "Unmatched";
  }
  return "Unknown";
}

CellLabel CellLabel::root(std::size_t index) { return CellLabel(static_cast<std::int32_t>(index)); }

CellLabel CellLabel::failure(FailureCode code) noexcept { return CellLabel(failure_to_code(code)); }

CellLabel CellLabel::from_code(std::int32_t code) {
  if (code < failure_to_code(FailureCode::Unmatched)) throw std::invalid_argument("unknown cell label code");
  return CellLabel(code);
}

std::size_t CellLabel::root_index() const {
  if (!is_root()) throw std::logic_error("cell label is a failure, not a root");
  return static_cast<std::size_t>(code_);
}

FailureCode CellLabel::failure_code() const {
  if (is_root()) throw std::logic_error("cell label is a root, not a failure");
  return static_cast<FailureCode>(-1 - code_);
}

CellLabel label_outcome(const SolveOutcome& outcome) {
  switch (outcome.status) {
    case SolveStatus::Converged:
      return outcome.root_index ? CellLabel::root(*outcome.root_index) : CellLabel::failure(FailureCode::Unmatched);
    case SolveStatus::StepUnderflow: return CellLabel::failure(FailureCode::StepUnderflow);
    case SolveStatus::SingularJacobian: return CellLabel::failure(FailureCode::SingularJacobian);
    case SolveStatus::MaxIterations: return CellLabel::failure(FailureCode::MaxIterations);
    case SolveStatus::NonFinite: return CellLabel::failure(FailureCode::NonFinite);
  }
  return CellLabel::failure(FailureCode::NonFinite);
}

std::optional<SolverSpec> SolverSpec::parse(std::string_view text) {
  if (text == "adaptive") return adaptive();
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const std::string_view head = text.substr(0, colon);
  const std::string_view tail = text.substr(colon + 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), value);
  if (ec != std::errc{} || ptr != tail.data() + tail.size()) return std::nullopt;
  if (head == "fixed" && value > 0.0 && value <= 1.0) return fixed(value);
  if (head == "reference" && value > 0.0 && value <= 1e-2) return reference(value);
  return std::nullopt;
}

std::string SolverSpec::name() const {
  switch (kind) {
    case Kind::Adaptive: return "adaptive";
    case Kind::FixedStep: return fmt::format("fixed:{}", step);
    case Kind::Reference: return fmt::format("reference:{}", step);
  }
  return "unknown";
}

void GridSpec::validate() const {
  if (domain.dim() != 2) throw std::invalid_argument("grid domain must be two-dimensional");
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid resolution must be at least 2 in each direction");
  for (const auto& axis : domain.axes)
    if (!(axis.lo < axis.hi)) throw std::invalid_argument("grid domain axis must satisfy lo < hi");
}

Vector GridSpec::start(std::size_t i, std::size_t j) const {
  const auto& ax = domain.axes[0];
  const auto& ay = domain.axes[1];
  return Vector{ax.lo + static_cast<double>(i) * (ax.hi - ax.lo) / static_cast<double>(nx - 1),
                ay.lo + static_cast<double>(j) * (ay.hi - ay.lo) / static_cast<double>(ny - 1)};
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("NEWTONFLOW_WORKERS")) {
    std::size_t value = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) return value;
  }
  return 1;
}

BasinGrid sample_grid(const ProblemDef& problem, const SolverSpec& solver, const GridSpec& grid,
                      const SolverConfig& config, std::size_t workers) {
  validate_for(problem, grid);
  config.validate();
  if (solver.kind == SolverSpec::Kind::FixedStep && !(solver.step > 0.0 && solver.step <= 1.0)) {
    throw std::invalid_argument("fixed step must lie in (0, 1]");
  }
  if (solver.kind == SolverSpec::Kind::Reference && !(solver.step > 0.0 && solver.step <= 1e-2)) {
    throw std::invalid_argument("reference step must lie in (0, 1e-2]");
  }

  BasinGrid out{grid, solver.name(), std::vector<CellRecord>(grid.cell_count())};
  for_each_cell(grid.cell_count(), workers, [&](std::size_t k) {
    out.cells[k] = run_cell(problem, solver, grid.start(k % grid.nx, k / grid.nx), config);
  });
  return out;
}

AttractorLabels compute_attractor_labels(const ProblemDef& problem, const GridSpec& grid, const OracleConfig& config,
                                         std::size_t workers) {
  validate_for(problem, grid);
  AttractorLabels labels(grid.cell_count());
  for_each_cell(grid.cell_count(), workers, [&](std::size_t k) {
    labels[k] = attractor_oracle(problem, grid.start(k % grid.nx, k / grid.nx), config);
  });
  return labels;
}

std::string_view to_string(Criterion criterion) noexcept {
  switch (criterion) {
    case Criterion::PlainConvergence: return "plain";
    case Criterion::CorrectAttractor: return "correct";
  }
  return "unknown";
}

StatsReport convergence_stats(const BasinGrid& grid, std::size_t root_count, Criterion criterion,
                              const AttractorLabels* oracle) {
  if (criterion == Criterion::CorrectAttractor) {
    if (oracle == nullptr) throw MissingOracleError("correct-attractor statistics need oracle labels");
    if (oracle->size() != grid.cells.size()) throw std::invalid_argument("oracle labels do not match the grid");
  }

  StatsReport report;
  report.solver = grid.solver;
  report.criterion = criterion;
  report.cells = grid.cells.size();
  report.per_root.assign(root_count, 0);

  for (std::size_t k = 0; k < grid.cells.size(); ++k) {
    const CellLabel label = grid.cells[k].label;
    if (!label.is_root()) {
      ++report.failures[std::string(to_string(label.failure_code()))];
      continue;
    }
    const std::size_t root = label.root_index();
    if (root >= root_count) throw std::invalid_argument("cell label references an unknown root");
    if (criterion == Criterion::CorrectAttractor) {
      const auto& expected = (*oracle)[k];
      if (!expected) {
        ++report.failures["NoAttractor"];
        continue;
      }
      if (*expected != root) {
        ++report.failures["WrongAttractor"];
        continue;
      }
    }
    ++report.per_root[root];
    ++report.convergent;
  }
  report.percent =
      report.cells == 0 ? 0.0 : 100.0 * static_cast<double>(report.convergent) / static_cast<double>(report.cells);
  return report;
}

Palette Palette::standard(std::size_t root_count) {
  static constexpr std::array<Rgb, 8> kRootColors{{{230, 57, 70},
                                                   {42, 157, 143},
                                                   {244, 162, 97},
                                                   {233, 196, 106},
                                                   {131, 56, 236},
                                                   {58, 134, 255},
                                                   {255, 0, 110},
                                                   {128, 185, 24}}};
  Palette palette;
  for (std::size_t k = 0; k < root_count; ++k) {
    Rgb c = kRootColors[k % kRootColors.size()];
    if (k >= kRootColors.size()) c.r = static_cast<std::uint8_t>(c.r / 2);  // keep repeats distinguishable
    palette.roots.push_back(c);
  }
  for (FailureCode code : kAllFailureCodes) palette.failures[code] = Rgb{10, 20, 80};
  return palette;
}

std::string render_ppm(const BasinGrid& grid, const Palette& palette, std::span<const Vector> marked_roots) {
  const std::size_t nx = grid.spec.nx;
  const std::size_t ny = grid.spec.ny;
  if (grid.cells.size() != nx * ny) throw std::invalid_argument("grid cell count does not match its resolution");

  std::vector<Rgb> pixels(nx * ny);  // raster order, top row first
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const CellLabel label = grid.cells[grid.spec.index(i, j)].label;
      Rgb color;
      if (label.is_root()) {
        if (label.root_index() >= palette.roots.size()) {
          throw std::invalid_argument("palette has no color for root " + std::to_string(label.root_index()));
        }
        color = palette.roots[label.root_index()];
      } else {
        const auto it = palette.failures.find(label.failure_code());
        if (it == palette.failures.end()) {
          throw std::invalid_argument("palette has no color for " + std::string(to_string(label.failure_code())));
        }
        color = it->second;
      }
      pixels[(ny - 1 - j) * nx + i] = color;
    }
  }

  if (std::min(nx, ny) >= 32) {
    const auto& ax = grid.spec.domain.axes[0];
    const auto& ay = grid.spec.domain.axes[1];
    const double radius = std::max(2.0, static_cast<double>(std::min(nx, ny)) / 80.0);
    for (const auto& root : marked_roots) {
      if (root.size() != 2 || !grid.spec.domain.contains(root)) continue;
      const double ci = (root[0] - ax.lo) / (ax.hi - ax.lo) * static_cast<double>(nx - 1);
      const double cj = (root[1] - ay.lo) / (ay.hi - ay.lo) * static_cast<double>(ny - 1);
      for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
          const double d = std::hypot(static_cast<double>(i) - ci, static_cast<double>(j) - cj);
          if (std::abs(d - radius) <= 0.5) {
            Rgb& p = pixels[(ny - 1 - j) * nx + i];
            p = Rgb{static_cast<std::uint8_t>(255 - p.r), static_cast<std::uint8_t>(255 - p.g),
                    static_cast<std::uint8_t>(255 - p.b)};
          }
        }
      }
    }
  }

  std::string out = fmt::format("P3\n{} {}\n255\n", nx, ny);
  // One pixel per line keeps every line under the 70-character plain-PPM limit.
  out.reserve(out.size() + pixels.size() * 12);
  for (const Rgb& p : pixels) fmt::format_to(std::back_inserter(out), "{} {} {}\n", p.r, p.g, p.b);
  return out;
}

}  // namespace newtonflow
