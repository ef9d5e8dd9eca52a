#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pbc/analysis.hpp"
#include "pbc/config.hpp"
#include "pbc/particle_problem.hpp"
#include "pbc/reference.hpp"

namespace pbc {

/// Projected initial condition on the configured seed layout.
ParticleField initial_particles(const ProblemConfig& config);

ParticleProblem make_particle_problem(const ProblemConfig& config);
ReferenceProblem make_reference_problem(const ProblemConfig& config);

struct ParticleRun {
  OptimizationResult result;
  StateTrajectory state;  ///< state at the final control
  double runtime_s = 0.0;
};

using IterationCallback = std::function<void(const OptimizationResult&)>;

ParticleRun run_particle_optimization(const ProblemConfig& config,
                                      const IterationCallback& on_iteration = {});

/// Reference optimum, read from `<cache_dir>/reference-<hash>.csv` when
/// present. Only the optimal control is stored; the state and adjoint are
/// recomputed from it. A fresh optimization is written back to the cache.
ReferenceOptimum cached_reference(const ProblemConfig& config, bool* from_cache = nullptr);

enum class Sweep { Epsilon, Spacing, Coupled };

Sweep parse_sweep(const std::string& name);

/// (h, epsilon) pairs of a sweep.
std::vector<std::pair<double, double>> sweep_points(const ProblemConfig& config, Sweep sweep);

/// Particle optimization at (h, epsilon) and its errors against the reference.
ErrorRecord evaluate_point(const ProblemConfig& config, double h, double epsilon,
                           const ReferenceOptimum& reference);

/// Runs every sweep point; failing points become NaN rows.
ConvergenceReport run_convergence(const ProblemConfig& config, Sweep sweep,
                                  const ReferenceOptimum& reference,
                                  const std::function<void(const ErrorRecord&, const std::string&)>&
                                      on_point = {});

/// `iter,cost,grad_norm_rel,step,backtracks`
void write_iteration_log(std::ostream& out, const OptimizationResult& result);

/// Parses a `t,u` file written by write_control_csv onto `grid`.
ControlFunction read_control_csv(std::istream& in, const TimeGrid& grid, double lower,
                                 double upper);

}  // namespace pbc
