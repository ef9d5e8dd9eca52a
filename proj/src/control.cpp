#include "pbc/control.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "pbc/errors.hpp"

namespace pbc {

void TimeGrid::validate() const {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw InvalidArgument("T must be positive");
  if (n_steps < 1) throw InvalidArgument("need at least one time step");
}

void ControlFunction::validate() const {
  grid.validate();
  if (values.size() != grid.nodes()) {
    throw GridMismatch("control has " + std::to_string(values.size()) + " values for " +
                       std::to_string(grid.nodes()) + " time nodes");
  }
  if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper) {
    throw InvalidArgument("control bounds must be finite with lower <= upper");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("control value is not finite");
  }
}

ControlFunction ControlFunction::constant(const TimeGrid& grid, double value, double lower,
                                          double upper) {
  ControlFunction u{grid, std::vector<double>(grid.nodes(), value), lower, upper};
  u.validate();
  return u;
}

namespace {

void require_grid(const TimeGrid& grid, std::size_t n) {
  if (n != grid.nodes()) throw GridMismatch("vector length does not match the time grid");
}

}  // namespace

double l2_inner_time(const TimeGrid& grid, std::span<const double> a, std::span<const double> b) {
  require_grid(grid, a.size());
  require_grid(grid, b.size());
  const std::size_t n = a.size();
  double sum = 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]);
  for (std::size_t k = 1; k + 1 < n; ++k) sum += a[k] * b[k];
  return sum * grid.dt();
}

double h1_inner_time(const TimeGrid& grid, std::span<const double> a, std::span<const double> b) {
  double derivative = 0.0;
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    derivative += (a[k + 1] - a[k]) * (b[k + 1] - b[k]);
  }
  return l2_inner_time(grid, a, b) + derivative / grid.dt();
}

double h1_norm_time(const TimeGrid& grid, std::span<const double> a) {
  return std::sqrt(std::max(0.0, h1_inner_time(grid, a, a)));
}

std::vector<double> riesz_inverse_H1(const TimeGrid& grid, std::span<const double> f) {
  grid.validate();
  require_grid(grid, f.size());
  const std::size_t n = f.size();
  const double dt = grid.dt();
  // (W + L / dt) g = W f with lumped mass W and Neumann stiffness L.
  std::vector<double> diag(n), off(n - 1, -1.0 / dt), rhs(f.begin(), f.end());
  for (std::size_t k = 0; k < n; ++k) {
    const bool end = k == 0 || k + 1 == n;
    const double mass = end ? 0.5 * dt : dt;
    diag[k] = mass + (end ? 1.0 : 2.0) / dt;
    rhs[k] *= mass;
  }
  const lapack_int info =
      LAPACKE_dptsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), 1, diag.data(), off.data(),
                    rhs.data(), static_cast<lapack_int>(n));
  if (info != 0) throw SingularSystem("H1 Riesz system is not positive definite");
  return rhs;
}

ControlFunction project_admissible(const ControlFunction& u) {
  ControlFunction out = u;
  for (double& v : out.values) v = std::clamp(v, u.lower, u.upper);
  return out;
}

double control_cost(const ControlFunction& u, double sigma) {
  return 0.5 * sigma * h1_inner_time(u.grid, u.values, u.values);
}

std::vector<double> reduced_gradient(const ControlFunction& u, std::span<const double> b_star_p,
                                     double sigma) {
  std::vector<double> g = riesz_inverse_H1(u.grid, b_star_p);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = sigma * u.values[k] - g[k];
  return g;
}

OptimizationResult optimize(ReducedProblem& problem, const ControlFunction& initial,
                            const OptimizerSettings& settings) {
  return optimize(problem, initial, settings, {});
}

OptimizationResult optimize(ReducedProblem& problem, const ControlFunction& initial,
                            const OptimizerSettings& settings,
                            const std::function<void(const OptimizationResult&)>& on_iteration) {
  initial.validate();
  if (!(initial.grid == problem.grid())) throw GridMismatch("control grid differs from problem");
  const TimeGrid& grid = initial.grid;
  auto total_cost = [&](const ControlFunction& u) {
    return problem.misfit(u) + control_cost(u, settings.sigma);
  };

  OptimizationResult result;
  ControlFunction u = project_admissible(initial);
  double cost = total_cost(u);

  for (int iteration = 0;; ++iteration) {
    const std::vector<double> gradient = reduced_gradient(u, problem.adjoint_source(), settings.sigma);

    ControlFunction unit_step = u;
    for (std::size_t k = 0; k < gradient.size(); ++k) unit_step.values[k] -= gradient[k];
    unit_step = project_admissible(unit_step);
    std::vector<double> projected(gradient.size());
    for (std::size_t k = 0; k < projected.size(); ++k) projected[k] = u.values[k] - unit_step.values[k];
    const double grad_norm = h1_norm_time(grid, projected);
    if (iteration == 0) result.initial_grad_norm = grad_norm;
    const double relative = result.initial_grad_norm > 0.0 ? grad_norm / result.initial_grad_norm : 0.0;

    result.cost_history.push_back(cost);
    result.grad_norm_history.push_back(relative);

    if (result.initial_grad_norm == 0.0 || relative < settings.gradient_tol) {
      result.converged = true;
    }
    if (result.converged || iteration >= settings.max_iterations) {
      result.step_history.push_back(0.0);
      result.armijo_backtracks.push_back(0);
      if (on_iteration) on_iteration(result);
      break;
    }

    double step = settings.initial_step;
    int backtracks = 0;
    ControlFunction trial;
    double trial_cost = 0.0;
    bool stalled = false;
    for (;;) {
      trial = u;
      for (std::size_t k = 0; k < gradient.size(); ++k) trial.values[k] -= step * gradient[k];
      trial = project_admissible(trial);
      trial_cost = total_cost(trial);
      std::vector<double> move(gradient.size());
      for (std::size_t k = 0; k < move.size(); ++k) move[k] = u.values[k] - trial.values[k];
      const double move_sq = h1_inner_time(grid, move, move);
      if (trial_cost <= cost - settings.sufficient_decrease / step * move_sq) break;
      if (++backtracks > settings.max_backtracks) {
        stalled = true;
        break;
      }
      step *= settings.contraction;
    }
    if (stalled) {
      // the gradient is no descent direction for the discrete cost any more
      result.line_search_failed = true;
      result.step_history.push_back(0.0);
      result.armijo_backtracks.push_back(settings.max_backtracks);
      if (on_iteration) on_iteration(result);
      break;
    }
    result.step_history.push_back(step);
    result.armijo_backtracks.push_back(backtracks);
    if (on_iteration) on_iteration(result);
    u = std::move(trial);
    cost = trial_cost;
  }
  result.control = u;
  return result;
}

}  // namespace pbc
