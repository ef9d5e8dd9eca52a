#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "pbc/control.hpp"

namespace pbc {

/// Fixed grid x_m = -L + m h_ref, m = 0..M, with homogeneous Dirichlet ends.
struct ReferenceSettings {
  double half_width = 12.0;
  double spacing = 2e-3;
  bool convection = true;
  /// |y| at the nodes next to +-L must stay below this.
  double boundary_tol = 1e-8;

  void validate() const;
  std::size_t intervals() const;
};

struct ReferenceSolution {
  TimeGrid grid;
  double x0 = 0.0;
  double dx = 0.0;
  std::vector<std::vector<double>> y;  ///< y[k][m] at t_k, x_m (boundary nodes included)
  std::vector<std::vector<double>> p;  ///< adjoint, empty until computed
  ControlFunction control;

  std::size_t points() const { return y.empty() ? 0 : y.front().size(); }
  double x(std::size_t m) const { return x0 + static_cast<double>(m) * dx; }
};

/// Central differences in space, implicit diffusion and explicit conservative
/// convection 1/2 (y^2)_x in time:
///   (I - dt nu Lap) y^{k+1} = y^k - dt/2 D(y^k)^2 + dt (u_k + u_{k+1})/2 chi.
/// Throws BoundaryContamination if the solution reaches the ends.
ReferenceSolution solve_reference_forward(const ControlFunction& u, const TimeGrid& grid,
                                          const std::function<double(double)>& y0,
                                          const std::function<double(double)>& chi, double nu,
                                          const ReferenceSettings& settings = {});

/// Adjoint of the discrete forward scheme for J = 1/2 ||y^N - y_d||^2_h:
///   p^N = y_d - y^N,  q^k = (I - dt nu Lap)^{-1} p^{k+1},  p^k = q^k + dt y^k D q^k.
/// Fills ref.p (p^k at every node) and returns B* p at the time nodes, scaled
/// so that the misfit derivative is -(trapezoid weights) * B* p.
std::vector<double> solve_reference_adjoint(ReferenceSolution& ref,
                                            const std::function<double(double)>& y_d,
                                            const std::function<double(double)>& chi, double nu,
                                            const ReferenceSettings& settings = {});

/// Same backward sweep with p^N given on the grid.
std::vector<double> solve_reference_adjoint_terminal(ReferenceSolution& ref,
                                                     std::vector<double> terminal,
                                                     const std::function<double(double)>& chi,
                                                     double nu, const ReferenceSettings& settings = {});

/// 1/2 h sum (y^N - y_d)^2 with trapezoid end weights.
double reference_misfit(const ReferenceSolution& ref, const std::function<double(double)>& y_d);

/// int y(t_k) dx by the trapezoid rule.
double reference_mass(const ReferenceSolution& ref, int k);

/// Reduced problem on the fixed grid. Its gradient is the exact derivative of
/// the discrete cost.
class ReferenceProblem : public ReducedProblem {
 public:
  ReferenceProblem(TimeGrid grid, std::function<double(double)> y0,
                   std::function<double(double)> chi, std::function<double(double)> y_d, double nu,
                   ReferenceSettings settings = {});

  const TimeGrid& grid() const override { return grid_; }
  double misfit(const ControlFunction& u) override;
  std::vector<double> adjoint_source() override;

  /// State (and adjoint, once requested) for the control last passed to misfit.
  const ReferenceSolution& solution() const { return state_; }

 private:
  TimeGrid grid_;
  std::function<double(double)> y0_, chi_, y_d_;
  double nu_;
  ReferenceSettings settings_;
  ReferenceSolution state_;
};

struct ReferenceOptimum {
  OptimizationResult result;
  ReferenceSolution solution;  ///< state and adjoint at the final control
};

ReferenceOptimum optimize_reference(
    ReferenceProblem& problem, const ControlFunction& initial, const OptimizerSettings& settings,
    const std::function<void(const OptimizationResult&)>& on_iteration = {});

/// CSV `t,x,y[,p]` every `time_stride` steps and `space_stride` nodes.
void write_reference_csv(std::ostream& out, const ReferenceSolution& ref, int time_stride,
                         int space_stride);

/// CSV `t,u`.
void write_control_csv(std::ostream& out, const ControlFunction& u);

}  // namespace pbc
