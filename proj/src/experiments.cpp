#include "pbc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string cache_file(const ProblemConfig& config) {
  char name[64];
  std::snprintf(name, sizeof name, "reference-%016llx.csv",
                static_cast<unsigned long long>(config.reference_hash()));
  return (std::filesystem::path(config.resolved_cache_dir()) / name).string();
}

}  // namespace

ParticleField initial_particles(const ProblemConfig& config) {
  return project_function(config.y0.function(), config.layout(), config.kernel());
}

ParticleProblem make_particle_problem(const ProblemConfig& config) {
  return ParticleProblem(initial_particles(config), config.grid(), config.chi.function(),
                         config.y_d.function(), config.nu, -config.ref_half_width,
                         config.ref_half_width, config.blowup_cap);
}

ReferenceProblem make_reference_problem(const ProblemConfig& config) {
  return ReferenceProblem(config.grid(), config.y0.function(), config.chi.function(),
                          config.y_d.function(), config.nu, config.reference());
}

ParticleRun run_particle_optimization(const ProblemConfig& config,
                                      const IterationCallback& on_iteration) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ParticleProblem problem = make_particle_problem(config);
  OptimizationResult result =
      optimize(problem, config.initial_control(), config.optimizer(), on_iteration);
  problem.misfit(result.control);
  ParticleRun run{std::move(result), problem.state(), 0.0};
  run.runtime_s = seconds_since(start);
  return run;
}

ControlFunction read_control_csv(std::istream& in, const TimeGrid& grid, double lower,
                                 double upper) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,u", 0) != 0) {
    throw ConfigError("control file lacks the t,u header");
  }
  ControlFunction u{grid, {}, lower, upper};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed control row '" + line + "'");
    u.values.push_back(std::stod(line.substr(comma + 1)));
  }
  u.validate();
  return u;
}

ReferenceOptimum cached_reference(const ProblemConfig& config, bool* from_cache) {
  config.validate();
  const std::string path = cache_file(config);
  ReferenceProblem problem = make_reference_problem(config);
  if (std::ifstream in(path); in) {
    ReferenceOptimum out;
    out.result.control = read_control_csv(in, config.grid(), config.u_lower, config.u_upper);
    problem.misfit(out.result.control);
    problem.adjoint_source();
    out.solution = problem.solution();
    if (from_cache) *from_cache = true;
    return out;
  }
  ReferenceOptimum out = optimize_reference(problem, config.initial_control(), config.optimizer());
  std::filesystem::create_directories(config.resolved_cache_dir());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream file(tmp);
    write_control_csv(file, out.result.control);
    if (!file) throw ConfigError("cannot write reference cache '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
  if (from_cache) *from_cache = false;
  return out;
}

Sweep parse_sweep(const std::string& name) {
  if (name == "eps") return Sweep::Epsilon;
  if (name == "h") return Sweep::Spacing;
  if (name == "coupled") return Sweep::Coupled;
  throw ConfigError("unknown sweep '" + name + "' (expected eps, h or coupled)");
}

std::vector<std::pair<double, double>> sweep_points(const ProblemConfig& config, Sweep sweep) {
  std::vector<std::pair<double, double>> out;
  switch (sweep) {
    case Sweep::Epsilon:
      for (double e : config.sweep_eps) out.emplace_back(config.sweep_eps_h, e);
      break;
    case Sweep::Spacing:
      for (double inv : config.sweep_inv_h) out.emplace_back(1.0 / inv, config.sweep_h_eps);
      break;
    case Sweep::Coupled:
      for (double h : config.sweep_coupled_h) out.emplace_back(h, std::sqrt(h));
      break;
  }
  return out;
}

ErrorRecord evaluate_point(const ProblemConfig& config, double h, double epsilon,
                           const ReferenceOptimum& reference) {
  ProblemConfig point = config;
  point.h = h;
  point.epsilon = epsilon;
  const ParticleRun run = run_particle_optimization(point);
  ErrorRecord record;
  record.h = h;
  record.epsilon = epsilon;
  record.err_y_L2V = error_L2V(run.state, reference.solution, config.error_lo, config.error_hi);
  record.err_u_H1 = error_H1_time(run.result.control, reference.result.control);
  record.runtime_s = run.runtime_s;
  return record;
}

ConvergenceReport run_convergence(
    const ProblemConfig& config, Sweep sweep, const ReferenceOptimum& reference,
    const std::function<void(const ErrorRecord&, const std::string&)>& on_point) {
  ConvergenceReport report;
  report.scale = sweep == Sweep::Epsilon ? SlopeScale::Epsilon : SlopeScale::Spacing;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [h, eps] : sweep_points(config, sweep)) {
    std::string failure;
    ErrorRecord record;
    const auto start = std::chrono::steady_clock::now();
    try {
      record = evaluate_point(config, h, eps, reference);
    } catch (const Error& e) {
      failure = e.what();
      record = ErrorRecord{h, eps, nan, nan, seconds_since(start)};
    }
    report.records.push_back(record);
    if (on_point) on_point(record, failure);
  }
  report.fit();
  return report;
}

void write_iteration_log(std::ostream& out, const OptimizationResult& result) {
  out.precision(12);
  out << "iter,cost,grad_norm_rel,step,backtracks\n";
  for (std::size_t k = 0; k < result.cost_history.size(); ++k) {
    out << k << ',' << result.cost_history[k] << ',' << result.grad_norm_history[k] << ','
        << result.step_history[k] << ',' << result.armijo_backtracks[k] << '\n';
  }
}

}  // namespace pbc
