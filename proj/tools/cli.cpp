#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string_view>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "newtonflow/adaptive.hpp"
#include "newtonflow/basin.hpp"
#include "newtonflow/classical.hpp"
#include "newtonflow/io.hpp"
#include "newtonflow/problems.hpp"

namespace newtonflow::cli {
namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string problem = "cubic";
  std::vector<std::string> solvers;
  std::string precond = "newton";
  SolverConfig solver;
  std::string x0;
  std::size_t resolution = 0;
  std::string domain;
  std::string criterion = "plain";
  std::string oracle_cache;
  std::string out_dir = ".";
  std::size_t workers = 1;
  double damped_step = 1e-2;
  double reference_dt = 1e-3;
  double reference_horizon = 40.0;
};

std::vector<double> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<double> values;
  while (true) {
    const auto comma = text.find(',');
    const std::string_view field = text.substr(0, comma);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
      throw UsageError(fmt::format("{}: cannot parse '{}' as a number", what, field));
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return values;
}

const ProblemDef& resolve_problem(const RunConfig& config, BuiltinId* id_out = nullptr) {
  const auto id = parse_builtin(config.problem);
  if (!id) throw UsageError("unknown problem '" + config.problem + "' (expected cubic, expsin or uniqueroot)");
  if (id_out != nullptr) *id_out = *id;
  return builtin_problem(*id);
}

Vector resolve_point(const RunConfig& config, const ProblemDef& problem) {
  if (config.x0.empty()) throw UsageError("--x0 is required");
  const auto values = parse_numbers(config.x0, "--x0");
  if (values.size() != problem.dim()) {
    throw UsageError(fmt::format("--x0 needs {} coordinates, got {}", problem.dim(), values.size()));
  }
  return Vector(std::span<const double>(values));
}

PreconditionerKind resolve_precond_kind(const std::string& name) {
  if (name == "newton") return PreconditionerKind::NewtonInverse;
  if (name == "picard") return PreconditionerKind::NegIdentity;
  if (name == "frozen") return PreconditionerKind::FrozenNewton;
  throw UsageError("unknown preconditioner '" + name + "' (expected newton, picard or frozen)");
}

Preconditioner make_precond(PreconditionerKind kind, const ProblemDef& problem, const Vector& x0) {
  switch (kind) {
    case PreconditionerKind::NegIdentity: return Preconditioner::neg_identity();
    case PreconditionerKind::NewtonInverse: return Preconditioner::newton_inverse();
    case PreconditionerKind::FrozenNewton: return Preconditioner::frozen_newton(problem, x0);
  }
  throw UsageError("unknown preconditioner");
}

SolverSpec resolve_solver(const std::string& text, PreconditionerKind precond) {
  auto spec = SolverSpec::parse(text);
  if (!spec) throw UsageError("unknown solver '" + text + "' (expected adaptive, fixed:<t> or reference:<dt>)");
  spec->preconditioner = precond;
  return *spec;
}

GridSpec resolve_grid(const RunConfig& config, const ProblemDef& problem) {
  if (config.resolution < 2) throw UsageError("--res must be at least 2");
  GridSpec grid{problem.domain(), config.resolution, config.resolution};
  if (!config.domain.empty()) {
    const auto v = parse_numbers(config.domain, "--domain");
    if (v.size() != 4 || !(v[0] < v[1]) || !(v[2] < v[3])) {
      throw UsageError("--domain expects xlo,xhi,ylo,yhi with lo < hi");
    }
    grid.domain = Box{{{v[0], v[1]}, {v[2], v[3]}}};
  }
  return grid;
}

void validate_solver_config(const SolverConfig& config) {
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string file_safe(std::string name) {
  std::replace_if(name.begin(), name.end(), [](char c) { return c == ':' || c == '/'; }, '-');
  return name;
}

fs::path prepare_out_dir(const RunConfig& config) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeFailure("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw RuntimeFailure("cannot open " + path.string() + " for writing");
  file << contents;
  file.close();
  if (!file) throw RuntimeFailure("failed writing " + path.string());
}

std::string root_name(const std::optional<std::size_t>& root) {
  return root ? std::to_string(*root) : std::string("none");
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const ProblemDef& problem = resolve_problem(config);
  const Vector x0 = resolve_point(config, problem);
  validate_solver_config(config.solver);
  const std::string solver_text = config.solvers.empty() ? "adaptive" : config.solvers.front();
  const SolverSpec spec = resolve_solver(solver_text, resolve_precond_kind(config.precond));
  if (spec.kind == SolverSpec::Kind::Reference) throw UsageError("solve supports adaptive and fixed:<t> solvers");

  SolveOutcome outcome;
  try {
    const Preconditioner precond = make_precond(spec.preconditioner, problem, x0);
    outcome = spec.kind == SolverSpec::Kind::Adaptive
                  ? solve_adaptive(problem, precond, x0, config.solver)
                  : solve_fixed_step(problem, precond, x0, spec.step, config.solver);
  } catch (const SingularMatrixError&) {
    outcome.status = SolveStatus::SingularJacobian;
    outcome.final_iterate = x0;
  }

  const fs::path dir = prepare_out_dir(config);
  const fs::path trace_path = dir / fmt::format("trace_{}_{}.csv", problem.name(), file_safe(spec.name()));
  std::ostringstream csv;
  write_trace_csv(csv, x0, outcome);
  write_file(trace_path, csv.str());

  std::string final_point;
  for (std::size_t d = 0; d < outcome.final_iterate.size(); ++d) {
    final_point += (d == 0 ? "" : ",") + format_number(outcome.final_iterate[d]);
  }
  fmt::print(out, "status={} iterations={} root={} x={} trace={}\n", to_string(outcome.status),
             outcome.iterations(), root_name(outcome.root_index), final_point, trace_path.string());
  return outcome.converged() ? kExitSuccess : kExitFailure;
}

AttractorLabels load_or_compute_oracle(const RunConfig& config, const ProblemDef& problem, const GridSpec& grid,
                                       std::ostream& out) {
  if (!config.oracle_cache.empty() && fs::exists(config.oracle_cache)) {
    std::ifstream in(config.oracle_cache);
    if (!in) throw RuntimeFailure("cannot read oracle cache " + config.oracle_cache);
    try {
      auto labels = read_oracle_cache(in, grid);
      fmt::print(out, "oracle: loaded {}\n", config.oracle_cache);
      return labels;
    } catch (const std::runtime_error& e) {
      throw RuntimeFailure(std::string("oracle cache ") + config.oracle_cache + ": " + e.what());
    }
  }
  AttractorLabels labels = compute_attractor_labels(problem, grid, OracleConfig{}, config.workers);
  if (!config.oracle_cache.empty()) {
    std::ostringstream csv;
    write_oracle_cache(csv, grid, labels);
    write_file(config.oracle_cache, csv.str());
    fmt::print(out, "oracle: wrote {}\n", config.oracle_cache);
  }
  return labels;
}

int cmd_basin(const RunConfig& config, std::ostream& out) {
  const ProblemDef& problem = resolve_problem(config);
  const GridSpec grid = resolve_grid(config, problem);
  validate_solver_config(config.solver);
  if (config.workers == 0) throw UsageError("--workers must be positive");

  Criterion criterion;
  if (config.criterion == "plain") {
    criterion = Criterion::PlainConvergence;
  } else if (config.criterion == "correct") {
    criterion = Criterion::CorrectAttractor;
  } else {
    throw UsageError("--criterion must be plain or correct");
  }

  const PreconditionerKind precond = resolve_precond_kind(config.precond);
  std::vector<SolverSpec> specs;
  for (const auto& text : config.solvers.empty() ? std::vector<std::string>{"adaptive"} : config.solvers) {
    specs.push_back(resolve_solver(text, precond));
  }

  const fs::path dir = prepare_out_dir(config);
  std::optional<AttractorLabels> oracle;
  if (criterion == Criterion::CorrectAttractor) oracle = load_or_compute_oracle(config, problem, grid, out);

  const Palette palette = Palette::standard(problem.known_roots().size());
  std::vector<StatsReport> reports;
  for (const auto& spec : specs) {
    const BasinGrid basin = sample_grid(problem, spec, grid, config.solver, config.workers);
    const fs::path image = dir / fmt::format("basin_{}_{}.ppm", problem.name(), file_safe(spec.name()));
    write_file(image, render_ppm(basin, palette, problem.known_roots()));
    reports.push_back(
        convergence_stats(basin, problem.known_roots().size(), criterion, oracle ? &*oracle : nullptr));
    fmt::print(out, "{}: {}% convergent ({}) -> {}\n", spec.name(), format_number(reports.back().percent),
               to_string(criterion), image.string());
  }

  const fs::path stats_path = dir / fmt::format("stats_{}.csv", problem.name());
  std::ostringstream csv;
  write_stats_csv(csv, reports);
  write_file(stats_path, csv.str());
  fmt::print(out, "stats -> {}\n", stats_path.string());
  return kExitSuccess;
}

int cmd_field(const RunConfig& config, std::ostream& out) {
  const ProblemDef& problem = resolve_problem(config);
  const GridSpec grid = resolve_grid(config, problem);
  const PreconditionerKind kind = resolve_precond_kind(config.precond);
  if (kind == PreconditionerKind::FrozenNewton && config.x0.empty()) {
    throw UsageError("the frozen preconditioner needs --x0 as its anchor");
  }
  std::optional<Preconditioner> precond;
  if (kind == PreconditionerKind::FrozenNewton) {
    try {
      precond = Preconditioner::frozen_newton(problem, resolve_point(config, problem));
    } catch (const SingularMatrixError&) {
      throw RuntimeFailure("the frozen preconditioner anchor lies on the singular set");
    }
  } else {
    precond = make_precond(kind, problem, Vector(problem.dim()));
  }

  std::ostringstream csv;
  csv << "x,y,Fx,Fy,singular_flag\n";
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const Vector x = grid.start(i, j);
      double fx = 0.0, fy = 0.0;
      int singular = 0;
      try {
        const Vector f = eval_field(problem, *precond, x);
        fx = f[0] + 0.0;  // prints -0 as 0
        fy = f[1] + 0.0;
      } catch (const SingularMatrixError&) {
        singular = 1;
      } catch (const NonFiniteError&) {
        singular = 1;
      }
      csv << format_number(x[0]) << ',' << format_number(x[1]) << ',' << format_number(fx) << ','
          << format_number(fy) << ',' << singular << '\n';
    }
  }
  const fs::path dir = prepare_out_dir(config);
  const fs::path path = dir / fmt::format("field_{}_{}.csv", problem.name(), config.precond);
  write_file(path, csv.str());
  fmt::print(out, "field -> {}\n", path.string());
  return kExitSuccess;
}

void append_solver_rows(std::ostream& csv, std::string_view method, const SolveOutcome& outcome, const Vector& x0) {
  double time = 0.0;
  csv << method << ",0,0," << format_number(x0[0]) << ',' << format_number(x0[1]) << ','
      << format_number(outcome.initial_residual_norm) << '\n';
  for (std::size_t k = 0; k < outcome.trace.size(); ++k) {
    const StepRecord& step = outcome.trace[k];
    time += step.t;
    csv << method << ',' << k + 1 << ',' << format_number(time) << ',' << format_number(step.x[0]) << ','
        << format_number(step.x[1]) << ',' << format_number(step.residual_norm) << '\n';
  }
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
  const ProblemDef& problem = resolve_problem(config);
  const Vector x0 = resolve_point(config, problem);
  validate_solver_config(config.solver);
  if (!(config.damped_step > 0.0 && config.damped_step <= 1.0)) throw RuntimeFailure("--dt must lie in (0, 1]");
  if (!(config.reference_dt > 0.0 && config.reference_dt <= 1e-2)) {
    throw RuntimeFailure("--ref-dt must lie in (0, 1e-2]");
  }
  if (!(config.reference_horizon > 0.0)) throw RuntimeFailure("--t-end must be positive");

  const Preconditioner newton = Preconditioner::newton_inverse();
  struct Run {
    std::string method;
    SolveOutcome outcome;
  };
  std::vector<Run> runs;
  runs.push_back({"adaptive", solve_adaptive(problem, newton, x0, config.solver)});
  runs.push_back({"newton", solve_fixed_step(problem, newton, x0, 1.0, config.solver)});
  runs.push_back({fmt::format("fixed:{}", config.damped_step),
                  solve_fixed_step(problem, newton, x0, config.damped_step, config.solver)});

  ReferenceOptions ref;
  ref.dt = config.reference_dt;
  ref.t_end = config.reference_horizon;
  ref.eps = config.solver.eps;
  ref.sample_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 / config.reference_dt)));
  const Trajectory trajectory = integrate_reference(problem, x0, ref);

  std::ostringstream csv;
  csv << "method,k,time,x0,x1,normf\n";
  for (const auto& run : runs) append_solver_rows(csv, run.method, run.outcome, x0);
  for (std::size_t k = 0; k < trajectory.samples.size(); ++k) {
    const auto& s = trajectory.samples[k];
    csv << "reference," << k << ',' << format_number(s.time) << ',' << format_number(s.x[0]) << ','
        << format_number(s.x[1]) << ',' << format_number(eval_f(problem, s.x).norm()) << '\n';
  }

  const fs::path dir = prepare_out_dir(config);
  const fs::path path = dir / fmt::format("compare_{}.csv", problem.name());
  write_file(path, csv.str());

  OracleConfig oracle_config;
  oracle_config.eps = config.solver.eps;
  const auto attractor = problem.known_roots().empty() ? std::nullopt : attractor_oracle(problem, x0, oracle_config);
  for (const auto& run : runs) {
    fmt::print(out, "{}: status={} iterations={} root={}\n", run.method, to_string(run.outcome.status),
               run.outcome.iterations(), root_name(run.outcome.root_index));
  }
  fmt::print(out, "reference: attractor={}\ncompare -> {}\n", root_name(attractor), path.string());
  return kExitSuccess;
}

void add_solver_options(CLI::App& cmd, RunConfig& config) {
  cmd.add_option("--problem", config.problem, "cubic | expsin | uniqueroot")->required();
  cmd.add_option("--tau", config.solver.tau, "error-indicator tolerance")->capture_default_str();
  cmd.add_option("--eps", config.solver.eps, "stop once ||F(x)|| <= eps")->capture_default_str();
  cmd.add_option("--t-lower", config.solver.t_lower, "smallest admissible step")->capture_default_str();
  cmd.add_option("--n-max", config.solver.n_max, "maximal number of outer iterations")->capture_default_str();
  cmd.add_option("--reduce", config.solver.reduce_factor, "step reduction factor in (0,1)")->capture_default_str();
  cmd.add_option("--out-dir", config.out_dir, "directory for output files")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive Newton-type root finding, basins of attraction, and the continuous Newton flow",
               "newtonflow"};
  app.require_subcommand(1);

  RunConfig config;
  config.workers = default_worker_count();

  auto* solve = app.add_subcommand("solve", "solve from one initial point and write the iteration trace");
  add_solver_options(*solve, config);
  solve->add_option("--x0", config.x0, "initial point, comma separated")->required();
  solve->add_option("--solver", config.solvers, "adaptive | fixed:<t>")->expected(1);
  solve->add_option("--precond", config.precond, "newton | picard | frozen")->capture_default_str();

  auto* basin = app.add_subcommand("basin", "sample a grid of initial values; write PPM images and statistics");
  add_solver_options(*basin, config);
  basin->add_option("--res", config.resolution, "grid points per axis (>= 2)")->required();
  basin->add_option("--solver", config.solvers, "adaptive | fixed:<t> | reference:<dt>; repeatable");
  basin->add_option("--precond", config.precond, "newton | picard | frozen")->capture_default_str();
  basin->add_option("--criterion", config.criterion, "plain | correct")->capture_default_str();
  basin->add_option("--oracle-cache", config.oracle_cache, "CSV cache of exact-attractor labels");
  basin->add_option("--domain", config.domain, "xlo,xhi,ylo,yhi (defaults to the problem box)");
  basin->add_option("--workers", config.workers, "worker threads (default NEWTONFLOW_WORKERS or 1)");

  auto* field = app.add_subcommand("field", "sample the direction field F(x) on a grid");
  add_solver_options(*field, config);
  field->add_option("--res", config.resolution, "grid points per axis (>= 2)")->required();
  field->add_option("--precond", config.precond, "newton | picard | frozen")->capture_default_str();
  field->add_option("--domain", config.domain, "xlo,xhi,ylo,yhi (defaults to the problem box)");
  field->add_option("--x0", config.x0, "anchor for the frozen preconditioner");

  auto* compare = app.add_subcommand("compare", "adaptive vs. fixed-step vs. reference flow from one point");
  add_solver_options(*compare, config);
  compare->add_option("--x0", config.x0, "initial point, comma separated")->required();
  compare->add_option("--dt", config.damped_step, "step of the damped fixed-step run")->capture_default_str();
  compare->add_option("--ref-dt", config.reference_dt, "reference integrator step")->capture_default_str();
  compare->add_option("--t-end", config.reference_horizon, "reference integration horizon")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(config, out);
    if (*basin) return cmd_basin(config, out);
    if (*field) return cmd_field(config, out);
    if (*compare) return cmd_compare(config, out);
  } catch (const UsageError& e) {
    fmt::print(err, "usage error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace newtonflow::cli
