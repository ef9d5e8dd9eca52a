#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "pbc/control.hpp"
#include "pbc/forward.hpp"
#include "pbc/reference.hpp"

namespace pbc {

/// L2 norm of grid values (uniform spacing dx) by the trapezoid rule.
double norm_H(std::span<const double> values, double dx);

/// sqrt(||v||_H^2 + ||v'||_H^2) with v' from central differences
/// (one-sided at the two ends).
double norm_V(std::span<const double> values, double dx);

/// Same norm with the derivative supplied.
double norm_V(std::span<const double> values, std::span<const double> derivatives, double dx);

/// Central differences inside, one-sided differences at the ends.
std::vector<double> grid_derivative(std::span<const double> values, double dx);

/// ||y_h - y_ref||_{L2(0,T;V)} over the reference nodes in [lo, hi]. The
/// particle derivative is exact, the reference one is differenced. Time
/// integration by the trapezoid rule.
double error_L2V(const StateTrajectory& traj, const ReferenceSolution& ref, double lo, double hi);

/// ||y_ref||_{L2(0,T;V)} on the same nodes.
double norm_L2V(const ReferenceSolution& ref, double lo, double hi);

/// ||u1 - u2||_{H1(0,T)}. Throws GridMismatch for different grids.
double error_H1_time(const ControlFunction& u1, const ControlFunction& u2);

/// Least-squares slope of log(error) against log(scale).
/// Throws InvalidArgument for fewer than three points or non-positive data,
/// DegenerateFit if all scales coincide.
double fit_slope(std::span<const double> scales, std::span<const double> errors);

struct ErrorRecord {
  double h = 0.0;
  double epsilon = 0.0;
  double err_y_L2V = 0.0;
  double err_u_H1 = 0.0;
  double runtime_s = 0.0;
};

enum class SlopeScale { Spacing, Epsilon };

struct ConvergenceReport {
  std::vector<ErrorRecord> records;
  SlopeScale scale = SlopeScale::Spacing;
  double slope_y = 0.0;  ///< NaN when fewer than three finite rows
  double slope_u = 0.0;

  /// Fits both slopes from the finite rows.
  void fit();
  /// `h,epsilon,err_y_L2V,err_u_H1,runtime_s` rows and a `# slope_y=.. slope_u=..` footer.
  void write_csv(std::ostream& out) const;
};

}  // namespace pbc
