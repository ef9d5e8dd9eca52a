#include "pbc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "pbc/errors.hpp"

namespace pbc {

namespace {

double trapezoid_sq(std::span<const double> v, double dx) {
  if (v.empty()) return 0.0;
  double acc = 0.5 * (v.front() * v.front() + v.back() * v.back());
  for (std::size_t m = 1; m + 1 < v.size(); ++m) acc += v[m] * v[m];
  if (v.size() == 1) acc = v[0] * v[0];
  return acc * dx;
}

struct NodeRange {
  std::size_t first = 0;
  std::size_t count = 0;
};

NodeRange nodes_in(const ReferenceSolution& ref, double lo, double hi) {
  if (!(lo < hi)) throw InvalidArgument("empty error window");
  const double a = std::ceil((lo - ref.x0) / ref.dx - 1e-9);
  const double b = std::floor((hi - ref.x0) / ref.dx + 1e-9);
  const double last = static_cast<double>(ref.points()) - 1.0;
  const double first = std::max(a, 0.0);
  const double end = std::min(b, last);
  if (end < first + 2.0) throw InvalidArgument("error window holds fewer than three nodes");
  return {static_cast<std::size_t>(first), static_cast<std::size_t>(end - first) + 1};
}

double time_trapezoid(const std::vector<double>& squares, double dt) {
  double acc = 0.5 * (squares.front() + squares.back());
  for (std::size_t k = 1; k + 1 < squares.size(); ++k) acc += squares[k];
  return acc * dt;
}

}  // namespace

std::vector<double> grid_derivative(std::span<const double> values, double dx) {
  const std::size_t n = values.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d.front() = (values[1] - values[0]) / dx;
  d.back() = (values[n - 1] - values[n - 2]) / dx;
  for (std::size_t m = 1; m + 1 < n; ++m) d[m] = (values[m + 1] - values[m - 1]) / (2.0 * dx);
  return d;
}

double norm_H(std::span<const double> values, double dx) {
  return std::sqrt(trapezoid_sq(values, dx));
}

double norm_V(std::span<const double> values, std::span<const double> derivatives, double dx) {
  if (values.size() != derivatives.size()) throw InvalidArgument("derivative size mismatch");
  return std::sqrt(trapezoid_sq(values, dx) + trapezoid_sq(derivatives, dx));
}

double norm_V(std::span<const double> values, double dx) {
  const std::vector<double> d = grid_derivative(values, dx);
  return norm_V(values, d, dx);
}

double error_L2V(const StateTrajectory& traj, const ReferenceSolution& ref, double lo, double hi) {
  if (!(traj.grid == ref.grid) || traj.snapshots.size() != ref.y.size()) {
    throw GridMismatch("particle and reference time grids differ");
  }
  const NodeRange r = nodes_in(ref, lo, hi);
  const double x_first = ref.x(r.first);
  std::vector<double> squares(ref.y.size());
  std::vector<double> diff(r.count), ddiff(r.count);
  for (std::size_t k = 0; k < ref.y.size(); ++k) {
    const GridSamples s = evaluate_on_grid(traj.snapshots[k], x_first, ref.dx, r.count);
    const std::span<const double> y(ref.y[k].data() + r.first, r.count);
    const std::vector<double> dy = grid_derivative(y, ref.dx);
    for (std::size_t m = 0; m < r.count; ++m) {
      diff[m] = s.values[m] - y[m];
      ddiff[m] = s.derivatives[m] - dy[m];
    }
    squares[k] = trapezoid_sq(diff, ref.dx) + trapezoid_sq(ddiff, ref.dx);
  }
  return std::sqrt(time_trapezoid(squares, ref.grid.dt()));
}

double norm_L2V(const ReferenceSolution& ref, double lo, double hi) {
  const NodeRange r = nodes_in(ref, lo, hi);
  std::vector<double> squares(ref.y.size());
  for (std::size_t k = 0; k < ref.y.size(); ++k) {
    const std::span<const double> y(ref.y[k].data() + r.first, r.count);
    const double n = norm_V(y, ref.dx);
    squares[k] = n * n;
  }
  return std::sqrt(time_trapezoid(squares, ref.grid.dt()));
}

double error_H1_time(const ControlFunction& u1, const ControlFunction& u2) {
  if (!(u1.grid == u2.grid) || u1.values.size() != u2.values.size()) {
    throw GridMismatch("controls live on different time grids");
  }
  std::vector<double> d(u1.values.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = u1.values[k] - u2.values[k];
  return h1_norm_time(u1.grid, d);
}

double fit_slope(std::span<const double> scales, std::span<const double> errors) {
  if (scales.size() != errors.size()) throw InvalidArgument("scale/error count mismatch");
  if (scales.size() < 3) throw InvalidArgument("slope fit needs at least three points");
  const double n = static_cast<double>(scales.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(scales[i]) ||
        !std::isfinite(errors[i])) {
      throw InvalidArgument("slope fit needs positive finite data");
    }
    sx += std::log(scales[i]);
    sy += std::log(errors[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double dx = std::log(scales[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (!(sxx > 1e-24)) throw DegenerateFit("scales are not distinct");
  return sxy / sxx;
}

void ConvergenceReport::fit() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto slope = [&](auto error_of) {
    std::vector<double> s, e;
    for (const ErrorRecord& r : records) {
      const double x = scale == SlopeScale::Spacing ? r.h : r.epsilon;
      const double y = error_of(r);
      if (std::isfinite(y) && y > 0.0 && std::isfinite(x) && x > 0.0) {
        s.push_back(x);
        e.push_back(y);
      }
    }
    if (s.size() < 3) return nan;
    try {
      return fit_slope(s, e);
    } catch (const DegenerateFit&) {
      return nan;
    }
  };
  slope_y = slope([](const ErrorRecord& r) { return r.err_y_L2V; });
  slope_u = slope([](const ErrorRecord& r) { return r.err_u_H1; });
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out.precision(10);
  out << "h,epsilon,err_y_L2V,err_u_H1,runtime_s\n";
  for (const ErrorRecord& r : records) {
    out << r.h << ',' << r.epsilon << ',' << r.err_y_L2V << ',' << r.err_u_H1 << ','
        << r.runtime_s << '\n';
  }
  out << "# slope_y=" << slope_y << " slope_u=" << slope_u << '\n';
}

}  // namespace pbc
