#include "pbc/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc {

void ParticleField::validate() const {
  kernel.validate();
  const std::size_t n = positions.size();
  if (n == 0) throw InvalidArgument("particle field is empty");
  if (weights.size() != n || amplitudes.size() != n) {
    throw InvalidArgument("particle field vectors differ in length");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(positions[i]) || !std::isfinite(weights[i]) ||
        !std::isfinite(amplitudes[i])) {
      throw InvalidArgument("particle field holds a non-finite entry at index " +
                            std::to_string(i));
    }
    if (!(weights[i] > 0.0)) {
      throw WeightCollapse("weight " + std::to_string(i) + " is not positive");
    }
    if (i > 0 && !(positions[i] > positions[i - 1])) {
      throw ParticleCrossing("positions not strictly increasing at index " + std::to_string(i));
    }
  }
}

void SeedLayout::validate() const {
  if (!std::isfinite(domain_lo) || !std::isfinite(domain_hi) || !(domain_lo < domain_hi)) {
    throw DegenerateLayout("need domain_lo < domain_hi");
  }
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw DegenerateLayout("margin must be >= 0");
  if (!(spacing_h > 0.0) || !(spacing_h < domain_hi - domain_lo)) {
    throw DegenerateLayout("spacing must lie in (0, domain length), fewer than two particles");
  }
}

namespace {

std::size_t interval_count(const SeedLayout& layout) {
  const double length = layout.domain_hi - layout.domain_lo + 2.0 * layout.margin;
  const double ratio = length / layout.spacing_h;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) < 1e-9 * std::max(1.0, ratio)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(ratio));
}

}  // namespace

std::size_t SeedLayout::count() const {
  validate();
  return interval_count(*this) + 1;
}

ParticleField seed_uniform(const SeedLayout& layout, const KernelSpec& kernel) {
  layout.validate();
  kernel.validate();
  const std::size_t intervals = interval_count(layout);
  if (intervals < 1) throw DegenerateLayout("fewer than two particles");
  const double start = layout.domain_lo - layout.margin;
  const double length = layout.domain_hi - layout.domain_lo + 2.0 * layout.margin;
  const double h = length / static_cast<double>(intervals);

  ParticleField field;
  field.kernel = kernel;
  const std::size_t n = intervals + 1;
  field.positions.resize(n);
  field.weights.assign(n, h);
  field.amplitudes.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) field.positions[i] = start + static_cast<double>(i) * h;
  field.weights.front() = 0.5 * h;
  field.weights.back() = 0.5 * h;
  return field;
}

ParticleField project_function(const std::function<double(double)>& f, const SeedLayout& layout,
                               const KernelSpec& kernel) {
  ParticleField field = seed_uniform(layout, kernel);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double value = f(field.positions[i]);
    if (!std::isfinite(value)) throw InvalidArgument("projected function is not finite");
    field.amplitudes[i] = value * field.weights[i];
  }
  return field;
}

std::pair<std::size_t, std::size_t> support_range(const ParticleField& field, double x) {
  const double radius = field.kernel.support();
  const auto first =
      std::lower_bound(field.positions.begin(), field.positions.end(), x - radius);
  const auto last = std::upper_bound(first, field.positions.end(), x + radius);
  return {static_cast<std::size_t>(first - field.positions.begin()),
          static_cast<std::size_t>(last - field.positions.begin())};
}

double evaluate_field(const ParticleField& field, double x) {
  const auto [first, last] = support_range(field, x);
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    sum += field.amplitudes[i] * kernel_eval(field.kernel, x - field.positions[i]);
  }
  return sum;
}

double evaluate_field_dx(const ParticleField& field, double x) {
  const auto [first, last] = support_range(field, x);
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    sum += field.amplitudes[i] * kernel_grad(field.kernel, x - field.positions[i]);
  }
  return sum;
}

GridSamples evaluate_on_grid(const ParticleField& field, double x0, double dx, std::size_t count) {
  if (!(dx > 0.0)) throw InvalidArgument("grid spacing must be positive");
  GridSamples out;
  out.values.assign(count, 0.0);
  out.derivatives.assign(count, 0.0);
  if (count == 0) return out;

  const double eps = field.kernel.epsilon;
  const double norm = std::numbers::inv_sqrtpi / eps;
  const double radius = field.kernel.support();
  const double step = dx / eps;
  // Gaussian values on a uniform grid satisfy a two-term multiplicative
  // recurrence; fall back to direct evaluation when the grid is coarse.
  const bool recur = step < 0.5;
  const double q = std::exp(-2.0 * step * step);
  const auto last_index = static_cast<long>(count) - 1;

  for (std::size_t i = 0; i < field.size(); ++i) {
    const double amp = field.amplitudes[i];
    if (amp == 0.0) continue;
    const double phi = field.positions[i];
    const long lo = std::max(0L, static_cast<long>(std::ceil((phi - radius - x0) / dx)));
    const long hi = std::min(last_index, static_cast<long>(std::floor((phi + radius - x0) / dx)));
    if (lo > hi) continue;

    auto deposit = [&](long m, double kernel_value, double z) {
      out.values[m] += amp * kernel_value;
      out.derivatives[m] += amp * (-2.0 * z / eps) * kernel_value;
    };
    if (!recur) {
      for (long m = lo; m <= hi; ++m) {
        const double z = (x0 + static_cast<double>(m) * dx - phi) / eps;
        deposit(m, norm * std::exp(-z * z), z);
      }
      continue;
    }
    const long center =
        std::clamp(static_cast<long>(std::lround((phi - x0) / dx)), lo, hi);
    const double zc = (x0 + static_cast<double>(center) * dx - phi) / eps;
    const double vc = norm * std::exp(-zc * zc);
    deposit(center, vc, zc);
    double value = vc;
    double ratio = std::exp(-2.0 * zc * step - step * step);
    for (long m = center + 1; m <= hi; ++m) {
      value *= ratio;
      ratio *= q;
      deposit(m, value, (x0 + static_cast<double>(m) * dx - phi) / eps);
    }
    value = vc;
    ratio = std::exp(2.0 * zc * step - step * step);
    for (long m = center - 1; m >= lo; --m) {
      value *= ratio;
      ratio *= q;
      deposit(m, value, (x0 + static_cast<double>(m) * dx - phi) / eps);
    }
  }
  return out;
}

void transport_weights(ParticleField& field, std::span<const double> velocity_gradient,
                       double dt) {
  if (velocity_gradient.size() != field.size()) {
    throw InvalidArgument("velocity gradient length does not match particle count");
  }
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double updated = field.weights[i] * (1.0 + dt * velocity_gradient[i]);
    if (!(updated > 0.0)) {
      std::ostringstream msg;
      msg << "weight of particle " << i << " collapsed to " << updated
          << " (velocity gradient " << velocity_gradient[i] << ", dt " << dt << ")";
      throw WeightCollapse(msg.str());
    }
    field.weights[i] = updated;
  }
}

void write_snapshot_header(std::ostream& out, std::string_view amplitude_name) {
  out.precision(15);
  out << "t,i,phi,omega," << amplitude_name << '\n';
}

void write_snapshot_rows(std::ostream& out, double t, const ParticleField& field) {
  for (std::size_t i = 0; i < field.size(); ++i) {
    out << t << ',' << i << ',' << field.positions[i] << ',' << field.weights[i] << ','
        << field.amplitudes[i] << '\n';
  }
}

}  // namespace pbc
