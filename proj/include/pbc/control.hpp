#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pbc {

/// Uniform grid t_k = k * T / n_steps, k = 0..n_steps.
struct TimeGrid {
  double t_final = 1.0;
  int n_steps = 500;

  double dt() const { return t_final / n_steps; }
  double time(int k) const { return t_final * static_cast<double>(k) / n_steps; }
  std::size_t nodes() const { return static_cast<std::size_t>(n_steps) + 1; }
  void validate() const;
  bool operator==(const TimeGrid&) const = default;
};

/// Nodal values of u on a time grid with box bounds u_l <= u <= u_u.
struct ControlFunction {
  TimeGrid grid;
  std::vector<double> values;
  double lower = 0.0;
  double upper = 100.0;

  void validate() const;
  /// Source strength used on the step t_k -> t_{k+1} (trapezoid average).
  double step_average(int k) const { return 0.5 * (values[k] + values[k + 1]); }

  static ControlFunction constant(const TimeGrid& grid, double value, double lower, double upper);
};

// --- L2(0,T) and H1(0,T) on the time grid -------------------------------
// The L2 part uses trapezoid weights, the derivative part forward differences,
// i.e. piecewise-linear finite elements with a lumped mass matrix.

double l2_inner_time(const TimeGrid& grid, std::span<const double> a, std::span<const double> b);
double h1_inner_time(const TimeGrid& grid, std::span<const double> a, std::span<const double> b);
double h1_norm_time(const TimeGrid& grid, std::span<const double> a);

/// Solves <g, v>_{H1(0,T)} = <f, v>_{L2(0,T)} for all discrete v: the
/// Neumann problem -g'' + g = f with P1 elements. Throws SingularSystem if
/// the tridiagonal factorization fails.
std::vector<double> riesz_inverse_H1(const TimeGrid& grid, std::span<const double> f);

/// Pointwise clipping onto [lower, upper].
ControlFunction project_admissible(const ControlFunction& u);

/// (sigma / 2) ||u||^2_{H1(0,T)}.
double control_cost(const ControlFunction& u, double sigma);

/// sigma u - R^{-1}_{H1} (B* p), with B* p given as a time-grid function.
std::vector<double> reduced_gradient(const ControlFunction& u, std::span<const double> b_star_p,
                                     double sigma);

/// Control-to-misfit map with adjoint-based sensitivities. Implementations
/// solve the state equation in `misfit` and keep that state for the next
/// `adjoint_source` call.
class ReducedProblem {
 public:
  virtual ~ReducedProblem() = default;

  virtual const TimeGrid& grid() const = 0;
  /// 1/2 ||y(T) - y_d||_H^2 for control u.
  virtual double misfit(const ControlFunction& u) = 0;
  /// B* p at the time nodes for the control last passed to `misfit`.
  virtual std::vector<double> adjoint_source() = 0;
};

struct OptimizerSettings {
  double sigma = 0.05;
  double initial_step = 1.0;
  double contraction = 0.5;
  double sufficient_decrease = 1e-4;
  double gradient_tol = 1e-3;  ///< on the projected gradient norm relative to iteration 0
  int max_iterations = 200;
  int max_backtracks = 30;
};

struct OptimizationResult {
  ControlFunction control;
  std::vector<double> cost_history;       ///< J at every iterate
  std::vector<double> grad_norm_history;  ///< ||u - P(u - g)||_{H1} / same at iterate 0
  std::vector<double> step_history;       ///< accepted step (0 for the final iterate)
  std::vector<int> armijo_backtracks;     ///< step halvings before acceptance
  double initial_grad_norm = 0.0;
  bool converged = false;
  /// Backtracking hit max_backtracks; the iteration stopped at the last accepted iterate.
  bool line_search_failed = false;
};

/// Projected steepest descent with an Armijo rule along the projection arc:
/// accept u(s) = P(u - s g) once J(u(s)) <= J(u) - (c1 / s) ||u - u(s)||^2_{H1}.
/// The iteration cap and a failed line search both yield converged = false.
OptimizationResult optimize(ReducedProblem& problem, const ControlFunction& initial,
                            const OptimizerSettings& settings);

/// Per-iteration callback variant (iteration index, result so far).
OptimizationResult optimize(ReducedProblem& problem, const ControlFunction& initial,
                            const OptimizerSettings& settings,
                            const std::function<void(const OptimizationResult&)>& on_iteration);

}  // namespace pbc
