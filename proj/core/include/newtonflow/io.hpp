#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "newtonflow/basin.hpp"
#include "newtonflow/outcome.hpp"

namespace newtonflow {

/// Seventeen significant digits; parses back to the same double.
[[nodiscard]] std::string format_number(double value);

/// Header `k,x0,...,x{n-1},t,gamma,normF,normf,rejections`. Row k = 0 is the
/// starting point (t, gamma and rejections zero); rows 1.. are accepted steps.
void write_trace_csv(std::ostream& out, const Vector& x0, const SolveOutcome& outcome);

/// Header `solver,criterion,percent,cells,failures`, one row per report.
void write_stats_csv(std::ostream& out, std::span<const StatsReport> reports);

/// Header `i,j,root_index`; -1 marks a start without an attractor.
void write_oracle_cache(std::ostream& out, const GridSpec& grid, const AttractorLabels& labels);

/// Reads a cache written by write_oracle_cache for the same grid resolution.
/// Throws std::runtime_error on malformed input or a resolution mismatch.
[[nodiscard]] AttractorLabels read_oracle_cache(std::istream& in, const GridSpec& grid);

}  // namespace newtonflow
