#include "pbc/reference.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pbc/errors.hpp"

namespace pbc {

void ReferenceSettings::validate() const {
  if (!(half_width > 0.0) || !(spacing > 0.0) || spacing >= half_width) {
    throw InvalidArgument("reference grid needs 0 < h_ref < L");
  }
  if (!(boundary_tol > 0.0)) throw InvalidArgument("boundary tolerance must be positive");
}

std::size_t ReferenceSettings::intervals() const {
  return static_cast<std::size_t>(std::llround(2.0 * half_width / spacing));
}

namespace {

/// LDL^T factors of I - dt nu Lap on the interior nodes.
class ImplicitDiffusion {
 public:
  ImplicitDiffusion(std::size_t interior, double c) : d_(interior, 1.0 + 2.0 * c), e_(interior - 1, -c) {
    const lapack_int info = LAPACKE_dpttrf(static_cast<lapack_int>(interior), d_.data(), e_.data());
    if (info != 0) throw SingularSystem("implicit diffusion matrix is not positive definite");
  }

  /// Solves in place on the interior part of a full-grid vector.
  void solve(std::vector<double>& full) const {
    const auto n = static_cast<lapack_int>(d_.size());
    const lapack_int info =
        LAPACKE_dpttrs(LAPACK_COL_MAJOR, n, 1, d_.data(), e_.data(), full.data() + 1, n);
    if (info != 0) throw SingularSystem("tridiagonal solve failed");
    full.front() = 0.0;
    full.back() = 0.0;
  }

 private:
  std::vector<double> d_, e_;
};

struct GridSetup {
  std::size_t points;
  double x0, dx;
};

GridSetup make_grid(const ReferenceSettings& settings) {
  settings.validate();
  const std::size_t m = settings.intervals();
  if (m < 4) throw InvalidArgument("reference grid too coarse");
  return {m + 1, -settings.half_width, 2.0 * settings.half_width / static_cast<double>(m)};
}

std::vector<double> sample(const std::function<double(double)>& f, const GridSetup& g) {
  std::vector<double> out(g.points, 0.0);
  for (std::size_t m = 1; m + 1 < g.points; ++m) out[m] = f(g.x0 + static_cast<double>(m) * g.dx);
  return out;
}

}  // namespace

ReferenceSolution solve_reference_forward(const ControlFunction& u, const TimeGrid& grid,
                                          const std::function<double(double)>& y0,
                                          const std::function<double(double)>& chi, double nu,
                                          const ReferenceSettings& settings) {
  grid.validate();
  u.validate();
  if (!(u.grid == grid)) throw GridMismatch("control and state time grids differ");
  if (!(nu > 0.0)) throw InvalidArgument("viscosity must be positive");
  const GridSetup g = make_grid(settings);
  const double dt = grid.dt();
  const ImplicitDiffusion diffusion(g.points - 2, dt * nu / (g.dx * g.dx));
  const std::vector<double> chi_values = sample(chi, g);
  const double half_over_h = 0.5 / g.dx;

  ReferenceSolution ref;
  ref.grid = grid;
  ref.x0 = g.x0;
  ref.dx = g.dx;
  ref.control = u;
  ref.y.reserve(grid.nodes());
  ref.y.push_back(sample(y0, g));

  for (int k = 0; k < grid.n_steps; ++k) {
    const std::vector<double>& y = ref.y.back();
    std::vector<double> next(g.points, 0.0);
    const double source = dt * 0.5 * (u.values[k] + u.values[k + 1]);
    for (std::size_t m = 1; m + 1 < g.points; ++m) {
      double value = y[m] + source * chi_values[m];
      if (settings.convection) {
        const double flux = (y[m + 1] * y[m + 1] - y[m - 1] * y[m - 1]) * half_over_h;
        value -= 0.5 * dt * flux;
      }
      next[m] = value;
    }
    diffusion.solve(next);
    const double edge = std::max(std::abs(next[1]), std::abs(next[g.points - 2]));
    if (!std::isfinite(edge) || edge > settings.boundary_tol) {
      throw BoundaryContamination("|y| = " + std::to_string(edge) + " next to x = +-" +
                                  std::to_string(settings.half_width) + " at t = " +
                                  std::to_string(grid.time(k + 1)));
    }
    ref.y.push_back(std::move(next));
  }
  return ref;
}

std::vector<double> solve_reference_adjoint_terminal(ReferenceSolution& ref,
                                                     std::vector<double> terminal,
                                                     const std::function<double(double)>& chi,
                                                     double nu, const ReferenceSettings& settings) {
  const GridSetup g = make_grid(settings);
  if (g.points != ref.points() || ref.y.size() != ref.grid.nodes()) {
    throw GridMismatch("reference solution does not match the settings");
  }
  if (terminal.size() != g.points) throw GridMismatch("terminal data size mismatch");
  const TimeGrid& grid = ref.grid;
  const double dt = grid.dt();
  const ImplicitDiffusion diffusion(g.points - 2, dt * nu / (g.dx * g.dx));
  const std::vector<double> chi_values = sample(chi, g);
  const double half_over_h = 0.5 / g.dx;

  terminal.front() = 0.0;
  terminal.back() = 0.0;
  ref.p.assign(grid.nodes(), {});
  ref.p[grid.n_steps] = std::move(terminal);

  // w[k] = h chi^T q^k belongs to the step k -> k+1.
  std::vector<double> w(grid.n_steps, 0.0);
  for (int k = grid.n_steps - 1; k >= 0; --k) {
    std::vector<double> q = ref.p[k + 1];
    diffusion.solve(q);
    double acc = 0.0;
    for (std::size_t m = 1; m + 1 < g.points; ++m) acc += chi_values[m] * q[m];
    w[k] = g.dx * acc;

    std::vector<double> p(g.points, 0.0);
    const std::vector<double>& y = ref.y[k];
    for (std::size_t m = 1; m + 1 < g.points; ++m) {
      p[m] = q[m];
      if (settings.convection) p[m] += dt * y[m] * (q[m + 1] - q[m - 1]) * half_over_h;
    }
    ref.p[k] = std::move(p);
  }

  // The source on step k is the average of u_k and u_{k+1}; dividing the
  // resulting nodal sensitivities by the trapezoid weights gives B* p.
  const int n = grid.n_steps;
  std::vector<double> out(grid.nodes());
  out[0] = w[0];
  out[n] = w[n - 1];
  for (int j = 1; j < n; ++j) out[j] = 0.5 * (w[j - 1] + w[j]);
  return out;
}

std::vector<double> solve_reference_adjoint(ReferenceSolution& ref,
                                            const std::function<double(double)>& y_d,
                                            const std::function<double(double)>& chi, double nu,
                                            const ReferenceSettings& settings) {
  std::vector<double> terminal = ref.y.back();
  for (std::size_t m = 0; m < terminal.size(); ++m) terminal[m] = y_d(ref.x(m)) - terminal[m];
  return solve_reference_adjoint_terminal(ref, std::move(terminal), chi, nu, settings);
}

double reference_misfit(const ReferenceSolution& ref, const std::function<double(double)>& y_d) {
  const std::vector<double>& y = ref.y.back();
  double acc = 0.0;
  for (std::size_t m = 0; m < y.size(); ++m) {
    const double d = y[m] - y_d(ref.x(m));
    const double weight = (m == 0 || m + 1 == y.size()) ? 0.5 : 1.0;
    acc += weight * d * d;
  }
  return 0.5 * ref.dx * acc;
}

double reference_mass(const ReferenceSolution& ref, int k) {
  const std::vector<double>& y = ref.y.at(static_cast<std::size_t>(k));
  double acc = 0.5 * (y.front() + y.back());
  for (std::size_t m = 1; m + 1 < y.size(); ++m) acc += y[m];
  return acc * ref.dx;
}

ReferenceProblem::ReferenceProblem(TimeGrid grid, std::function<double(double)> y0,
                                   std::function<double(double)> chi,
                                   std::function<double(double)> y_d, double nu,
                                   ReferenceSettings settings)
    : grid_(grid),
      y0_(std::move(y0)),
      chi_(std::move(chi)),
      y_d_(std::move(y_d)),
      nu_(nu),
      settings_(settings) {
  grid_.validate();
  settings_.validate();
}

double ReferenceProblem::misfit(const ControlFunction& u) {
  state_ = solve_reference_forward(u, grid_, y0_, chi_, nu_, settings_);
  return reference_misfit(state_, y_d_);
}

std::vector<double> ReferenceProblem::adjoint_source() {
  if (state_.y.empty()) throw InvalidArgument("adjoint requested before any state solve");
  return solve_reference_adjoint(state_, y_d_, chi_, nu_, settings_);
}

ReferenceOptimum optimize_reference(
    ReferenceProblem& problem, const ControlFunction& initial, const OptimizerSettings& settings,
    const std::function<void(const OptimizationResult&)>& on_iteration) {
  ReferenceOptimum out;
  out.result = optimize(problem, initial, settings, on_iteration);
  // The driver's last misfit call may belong to a rejected trial point.
  problem.misfit(out.result.control);
  problem.adjoint_source();
  out.solution = problem.solution();
  return out;
}

void write_reference_csv(std::ostream& out, const ReferenceSolution& ref, int time_stride,
                         int space_stride) {
  const bool with_p = ref.p.size() == ref.y.size();
  out.precision(15);
  out << (with_p ? "t,x,y,p\n" : "t,x,y\n");
  time_stride = std::max(time_stride, 1);
  space_stride = std::max(space_stride, 1);
  const int last = static_cast<int>(ref.y.size()) - 1;
  for (int k = 0; k <= last; ++k) {
    if (k % time_stride != 0 && k != last) continue;
    const double t = ref.grid.time(k);
    for (std::size_t m = 0; m < ref.points(); m += static_cast<std::size_t>(space_stride)) {
      out << t << ',' << ref.x(m) << ',' << ref.y[k][m];
      if (with_p) out << ',' << ref.p[k][m];
      out << '\n';
    }
  }
}

void write_control_csv(std::ostream& out, const ControlFunction& u) {
  out.precision(17);
  out << "t,u\n";
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    out << u.grid.time(static_cast<int>(k)) << ',' << u.values[k] << '\n';
  }
}

}  // namespace pbc
