// Command-line front end: kernel checks, optimization runs, reference
// solutions and convergence sweeps. All outputs are CSV files.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pbc/errors.hpp"
#include "pbc/experiments.hpp"
#include "pbc/kernels.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolver = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string backend = "particle";
  bool dump_trajectory = false;
  std::string sweep;
  double corrupt = 1.0;
};

pbc::ProblemConfig build_config(const Options& opt) {
  pbc::ProblemConfig config = opt.config_path.empty() ? pbc::ProblemConfig{}
                                                      : pbc::load_config(opt.config_path);
  for (const std::string& item : opt.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw pbc::ConfigError("--set expects key=value, got '" + item + "'");
    config.set(item.substr(0, eq), item.substr(eq + 1));
  }
  if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
  config.validate();
  std::filesystem::create_directories(config.output_dir);
  return config;
}

std::ofstream open_output(const pbc::ProblemConfig& config, const std::string& name) {
  const auto path = std::filesystem::path(config.output_dir) / name;
  std::ofstream out(path);
  if (!out) throw pbc::ConfigError("cannot write '" + path.string() + "'");
  return out;
}

int cmd_verify_kernel(const Options& opt) {
  const pbc::ProblemConfig config = build_config(opt);
  bool all_pass = true;
  std::printf("%-10s %-22s %-22s %-22s %s\n", "epsilon", "zeroth", "first", "second", "result");
  for (double eps : config.verify_eps) {
    const pbc::KernelSpec spec = pbc::KernelSpec::gaussian(eps);
    pbc::MomentReport report;
    if (opt.corrupt == 1.0) {
      report = pbc::verify_moments(spec, config.verify_tol);
    } else {
      const double factor = opt.corrupt;
      report = pbc::verify_moments(
          [&](double x) { return factor * pbc::kernel_eval(spec, x); }, eps, spec.order_r,
          config.verify_tol);
    }
    all_pass = all_pass && report.pass;
    std::printf("%-10g %-22.15g %-22.15g %-22.15g %s\n", eps, report.zeroth, report.first,
                report.second, report.pass ? "pass" : "FAIL");
  }
  return all_pass ? kExitOk : kExitFailed;
}

void print_iteration(const pbc::OptimizationResult& r) {
  const std::size_t k = r.cost_history.size() - 1;
  std::printf("iter %4zu  J = %.10g  |g|/|g0| = %.3e  backtracks = %d\n", k, r.cost_history[k],
              r.grad_norm_history[k], r.armijo_backtracks[k]);
  std::fflush(stdout);
}

int cmd_optimize(const Options& opt) {
  const pbc::ProblemConfig config = build_config(opt);
  pbc::OptimizationResult result;
  if (opt.backend == "particle") {
    const pbc::ParticleRun run = pbc::run_particle_optimization(config, print_iteration);
    result = run.result;
    auto state_out = open_output(config, "state.csv");
    if (opt.dump_trajectory) {
      pbc::write_trajectory_csv(state_out, run.state.grid, run.state.snapshots);
    } else {
      pbc::write_snapshot_header(state_out);
      pbc::write_snapshot_rows(state_out, config.t_final, run.state.final_state());
    }
    if (opt.dump_trajectory) {
      const pbc::AdjointTrajectory adj = pbc::solve_adjoint(run.state, config.y_d.function());
      auto adj_out = open_output(config, "adjoint.csv");
      pbc::write_trajectory_csv(adj_out, adj.grid, adj.snapshots, 1, "beta");
    }
    std::printf("runtime %.1f s\n", run.runtime_s);
  } else if (opt.backend == "reference") {
    pbc::ReferenceProblem problem = pbc::make_reference_problem(config);
    const pbc::ReferenceOptimum ref = pbc::optimize_reference(
        problem, config.initial_control(), config.optimizer(), print_iteration);
    result = ref.result;
    auto state_out = open_output(config, "state.csv");
    if (opt.dump_trajectory) {
      pbc::write_reference_csv(state_out, ref.solution, 1, 1);
    } else {
      state_out.precision(15);
      state_out << "t,x,y\n";
      const auto& y = ref.solution.y.back();
      for (std::size_t m = 0; m < y.size(); ++m) {
        state_out << config.t_final << ',' << ref.solution.x(m) << ',' << y[m] << '\n';
      }
    }
  } else {
    throw pbc::ConfigError("unknown backend '" + opt.backend + "'");
  }
  auto log = open_output(config, "iterations.csv");
  pbc::write_iteration_log(log, result);
  auto control = open_output(config, "control.csv");
  pbc::write_control_csv(control, result.control);
  const char* status = result.converged            ? "converged"
                       : result.line_search_failed ? "NOT converged (line search stalled)"
                                                   : "NOT converged";
  std::printf("%s after %zu iterations, J = %.10g\n", status, result.cost_history.size() - 1,
              result.cost_history.back());
  return result.converged ? kExitOk : kExitFailed;
}

int cmd_reference(const Options& opt) {
  const pbc::ProblemConfig config = build_config(opt);
  bool cached = false;
  const pbc::ReferenceOptimum ref = pbc::cached_reference(config, &cached);
  double peak = 0.0;
  for (double v : ref.solution.y.back()) peak = std::max(peak, v);
  std::printf("reference %s, max y(T) = %.6g\n", cached ? "loaded from cache" : "computed", peak);
  auto control = open_output(config, "reference_control.csv");
  pbc::write_control_csv(control, ref.result.control);
  auto field = open_output(config, "reference.csv");
  const int space_stride = opt.dump_trajectory ? 1 : 10;
  const int time_stride = opt.dump_trajectory ? 1 : 50;
  pbc::write_reference_csv(field, ref.solution, time_stride, space_stride);
  return cached || ref.result.converged ? kExitOk : kExitFailed;
}

int cmd_convergence(const Options& opt) {
  const pbc::ProblemConfig config = build_config(opt);
  const pbc::Sweep sweep = pbc::parse_sweep(opt.sweep);
  bool cached = false;
  const pbc::ReferenceOptimum ref = pbc::cached_reference(config, &cached);
  std::printf("reference %s\n", cached ? "loaded from cache" : "computed and cached");
  const pbc::ConvergenceReport report = pbc::run_convergence(
      config, sweep, ref, [](const pbc::ErrorRecord& r, const std::string& failure) {
        if (failure.empty()) {
          std::printf("h = %-8g eps = %-8g err_y = %.4e err_u = %.4e (%.1f s)\n", r.h, r.epsilon,
                      r.err_y_L2V, r.err_u_H1, r.runtime_s);
        } else {
          std::printf("h = %-8g eps = %-8g failed: %s\n", r.h, r.epsilon, failure.c_str());
        }
        std::fflush(stdout);
      });
  auto out = open_output(config, "convergence_" + opt.sweep + ".csv");
  report.write_csv(out);
  std::printf("slope_y = %.4f slope_u = %.4f\n", report.slope_y, report.slope_u);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of the viscous Burgers equation with particle methods"};
  app.require_subcommand(1);
  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "key=value configuration file");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--set", opt.overrides, "override a configuration key (key=value)");
  };

  CLI::App* verify = app.add_subcommand("verify-kernel", "check the kernel moment conditions");
  add_common(verify);
  verify->add_option("--corrupt", opt.corrupt, "scale the kernel by this factor before checking");

  CLI::App* optimize = app.add_subcommand("optimize", "run the projected steepest descent");
  add_common(optimize);
  optimize->add_option("--backend", opt.backend, "particle or reference")
      ->check(CLI::IsMember({"particle", "reference"}));
  optimize->add_flag("--dump-trajectory", opt.dump_trajectory, "write every time step");

  CLI::App* reference = app.add_subcommand("reference", "compute or load the reference optimum");
  add_common(reference);
  reference->add_flag("--dump-trajectory", opt.dump_trajectory, "write the full grid");

  CLI::App* convergence = app.add_subcommand("convergence", "run a convergence sweep");
  add_common(convergence);
  convergence->add_option("--sweep", opt.sweep, "eps, h or coupled")
      ->required()
      ->check(CLI::IsMember({"eps", "h", "coupled"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify_kernel(opt);
    if (*optimize) return cmd_optimize(opt);
    if (*reference) return cmd_reference(opt);
    if (*convergence) return cmd_convergence(opt);
  } catch (const pbc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pbc::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}
