#include "newtonflow/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include <fmt/format.h>

namespace newtonflow {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line_number) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::runtime_error(fmt::format("oracle cache line {}: malformed field '{}'", line_number, text));
  }
  return value;
}

}  // namespace

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

void write_trace_csv(std::ostream& out, const Vector& x0, const SolveOutcome& outcome) {
  out << 'k';
  for (std::size_t d = 0; d < x0.size(); ++d) out << ",x" << d;
  out << ",t,gamma,normF,normf,rejections\n";

  out << 0;
  for (double v : x0.values()) out << ',' << format_number(v);
  out << ",0,0," << format_number(outcome.initial_field_norm) << ',' << format_number(outcome.initial_residual_norm)
      << ",0\n";

  for (std::size_t k = 0; k < outcome.trace.size(); ++k) {
    const StepRecord& step = outcome.trace[k];
    out << k + 1;
    for (double v : step.x.values()) out << ',' << format_number(v);
    out << ',' << format_number(step.t) << ',' << format_number(step.gamma) << ',' << format_number(step.field_norm)
        << ',' << format_number(step.residual_norm) << ',' << step.rejections << '\n';
  }
}

void write_stats_csv(std::ostream& out, std::span<const StatsReport> reports) {
  out << "solver,criterion,percent,cells,failures\n";
  for (const auto& report : reports) {
    out << report.solver << ',' << to_string(report.criterion) << ',' << format_number(report.percent) << ','
        << report.cells << ',' << report.failure_count() << '\n';
  }
}

void write_oracle_cache(std::ostream& out, const GridSpec& grid, const AttractorLabels& labels) {
  if (labels.size() != grid.cell_count()) throw std::invalid_argument("oracle labels do not match the grid");
  out << "i,j,root_index\n";
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const auto& label = labels[grid.index(i, j)];
      out << i << ',' << j << ',';
      if (label) {
        out << *label;
      } else {
        out << -1;
      }
      out << '\n';
    }
  }
}

AttractorLabels read_oracle_cache(std::istream& in, const GridSpec& grid) {
  std::string line;
  if (!std::getline(in, line) || line != "i,j,root_index") {
    throw std::runtime_error("oracle cache is missing its 'i,j,root_index' header");
  }
  AttractorLabels labels(grid.cell_count());
  std::vector<bool> seen(grid.cell_count(), false);
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) throw std::runtime_error(fmt::format("oracle cache line {}: expected 3 fields", line_number));
    const auto i = parse_field<std::size_t>(fields[0], line_number);
    const auto j = parse_field<std::size_t>(fields[1], line_number);
    const auto root = parse_field<long long>(fields[2], line_number);
    if (i >= grid.nx || j >= grid.ny) {
      throw std::runtime_error(fmt::format("oracle cache line {}: cell ({}, {}) outside the grid", line_number, i, j));
    }
    if (root < -1) throw std::runtime_error(fmt::format("oracle cache line {}: invalid root index", line_number));
    const std::size_t k = grid.index(i, j);
    if (root >= 0) labels[k] = static_cast<std::size_t>(root);
    seen[k] = true;
  }
  for (bool s : seen)
    if (!s) throw std::runtime_error("oracle cache does not cover every grid cell");
  return labels;
}

}  // namespace newtonflow
