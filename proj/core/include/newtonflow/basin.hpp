#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "newtonflow/classical.hpp"
#include "newtonflow/field.hpp"
#include "newtonflow/outcome.hpp"

namespace newtonflow {

enum class FailureCode : std::int8_t {
  SingularJacobian,
  StepUnderflow,
  MaxIterations,
  NonFinite,
  Unmatched,  // converged, but not within the match tolerance of a known root
};

inline constexpr FailureCode kAllFailureCodes[] = {FailureCode::SingularJacobian, FailureCode::StepUnderflow,
                                                   FailureCode::MaxIterations, FailureCode::NonFinite,
                                                   FailureCode::Unmatched};

[[nodiscard]] std::string_view to_string(FailureCode code) noexcept;

/// Outcome of one grid cell: the index of the root reached, or why none was.
class CellLabel {
 public:
  static CellLabel root(std::size_t index);
  static CellLabel failure(FailureCode code) noexcept;
  /// Inverse of code(): non-negative values are roots, negative ones failures.
  static CellLabel from_code(std::int32_t code);

  [[nodiscard]] bool is_root() const noexcept { return code_ >= 0; }
  [[nodiscard]] std::size_t root_index() const;
  [[nodiscard]] FailureCode failure_code() const;
  [[nodiscard]] std::int32_t code() const noexcept { return code_; }

  friend bool operator==(CellLabel, CellLabel) = default;

 private:
  explicit CellLabel(std::int32_t code) : code_(code) {}
  std::int32_t code_;
};

[[nodiscard]] CellLabel label_outcome(const SolveOutcome& outcome);

/// Which discrete or continuous scheme labels the cells.
struct SolverSpec {
  enum class Kind { Adaptive, FixedStep, Reference };

  Kind kind = Kind::Adaptive;
  double step = 1.0;  // t for FixedStep, dt for Reference
  PreconditionerKind preconditioner = PreconditionerKind::NewtonInverse;

  static SolverSpec adaptive() { return {Kind::Adaptive, 1.0}; }
  static SolverSpec fixed(double t) { return {Kind::FixedStep, t}; }
  static SolverSpec reference(double dt) { return {Kind::Reference, dt}; }

  /// "adaptive", "fixed:<t>", or "reference:<dt>".
  static std::optional<SolverSpec> parse(std::string_view text);
  [[nodiscard]] std::string name() const;
};

/// Equally spaced starts including both box ends: cell (i, j) starts at
/// (lo_x + i (hi_x - lo_x)/(nx - 1), lo_y + j (hi_y - lo_y)/(ny - 1)).
struct GridSpec {
  Box domain;
  std::size_t nx = 0;
  std::size_t ny = 0;

  /// Throws std::invalid_argument unless the box is 2D and nx, ny >= 2.
  void validate() const;
  [[nodiscard]] std::size_t cell_count() const noexcept { return nx * ny; }
  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }
  [[nodiscard]] Vector start(std::size_t i, std::size_t j) const;
};

struct CellRecord {
  CellLabel label = CellLabel::failure(FailureCode::MaxIterations);
  std::uint32_t iterations = 0;
  std::uint32_t field_evaluations = 0;

  friend bool operator==(const CellRecord&, const CellRecord&) = default;
};

struct BasinGrid {
  GridSpec spec;
  std::string solver;
  std::vector<CellRecord> cells;  // index j*nx + i

  [[nodiscard]] const CellRecord& at(std::size_t i, std::size_t j) const { return cells.at(spec.index(i, j)); }
};

/// Per-cell exact-attractor labels; nullopt where the continuous flow reaches no root.
using AttractorLabels = std::vector<std::optional<std::size_t>>;

/// Worker count from NEWTONFLOW_WORKERS, or 1.
[[nodiscard]] std::size_t default_worker_count();

/// Runs `solver` from every grid start. Cells are independent and written by
/// index, so the result does not depend on `workers`.
[[nodiscard]] BasinGrid sample_grid(const ProblemDef& problem, const SolverSpec& solver, const GridSpec& grid,
                                    const SolverConfig& config = {}, std::size_t workers = 1);

[[nodiscard]] AttractorLabels compute_attractor_labels(const ProblemDef& problem, const GridSpec& grid,
                                                       const OracleConfig& config = {}, std::size_t workers = 1);

enum class Criterion { PlainConvergence, CorrectAttractor };

[[nodiscard]] std::string_view to_string(Criterion criterion) noexcept;

class MissingOracleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct StatsReport {
  std::string solver;
  Criterion criterion = Criterion::PlainConvergence;
  double percent = 0.0;
  std::size_t cells = 0;
  std::size_t convergent = 0;
  std::vector<std::size_t> per_root;
  /// Non-convergent cells by reason: grid failure codes plus, under the
  /// correct-attractor criterion, "WrongAttractor" and "NoAttractor".
  std::map<std::string, std::size_t> failures;

  [[nodiscard]] std::size_t failure_count() const noexcept { return cells - convergent; }
};

/// Percentage of convergent cells. Under CorrectAttractor a cell counts only if
/// its root equals the oracle's; cells without an attractor stay in the
/// denominator. Throws MissingOracleError when the criterion needs labels that
/// were not supplied.
[[nodiscard]] StatsReport convergence_stats(const BasinGrid& grid, std::size_t root_count, Criterion criterion,
                                            const AttractorLabels* oracle = nullptr);

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(Rgb, Rgb) = default;
};

struct Palette {
  std::vector<Rgb> roots;
  std::map<FailureCode, Rgb> failures;

  /// Distinct root colors followed by a dark blue for every failure code.
  static Palette standard(std::size_t root_count);
};

/// Plain-text PPM (P3, maxval 255), one pixel per cell, top row = largest y.
/// Each of `marked_roots` inside the domain gets a small ring of inverted
/// color on grids of at least 32x32. Throws std::invalid_argument when the
/// palette has no color for an occurring label.
[[nodiscard]] std::string render_ppm(const BasinGrid& grid, const Palette& palette,
                                     std::span<const Vector> marked_roots = {});

}  // namespace newtonflow
