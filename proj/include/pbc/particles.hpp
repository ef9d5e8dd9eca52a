#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "pbc/kernels.hpp"

namespace pbc {

/// y_h(x) = sum_i amplitudes[i] * delta_eps(x - positions[i]).
///
/// Amplitudes are the coefficients of the smoothed Dirac masses (value times
/// quadrature weight), not nodal values. Weights are the particle quadrature
/// weights omega_i carried along the flow by the Jacobian of the flow map.
struct ParticleField {
  std::vector<double> positions;
  std::vector<double> weights;
  std::vector<double> amplitudes;
  KernelSpec kernel;

  std::size_t size() const { return positions.size(); }

  /// Checks sizes, ordering, positivity of weights and finiteness.
  void validate() const;
};

/// Initial particle placement: uniform spacing over [lo - margin, hi + margin].
struct SeedLayout {
  double domain_lo = -5.0;
  double domain_hi = 5.0;
  double spacing_h = 0.1;
  double margin = 0.0;

  void validate() const;
  /// Number of particles seed_uniform will create.
  std::size_t count() const;
};

/// Uniform seeding with trapezoid weights (h/2 at both ends) and zero amplitudes.
/// If the padded length is not a multiple of h the spacing is shrunk so that
/// the end points are hit exactly.
ParticleField seed_uniform(const SeedLayout& layout, const KernelSpec& kernel);

/// Smoothed particle interpolation: amplitudes alpha_i = f(X_i) * omega_i.
ParticleField project_function(const std::function<double(double)>& f, const SeedLayout& layout,
                               const KernelSpec& kernel);

/// Index range [first, last) of particles within the kernel support of x.
std::pair<std::size_t, std::size_t> support_range(const ParticleField& field, double x);

double evaluate_field(const ParticleField& field, double x);
double evaluate_field_dx(const ParticleField& field, double x);

/// Samples y_h and d/dx y_h on the uniform grid x0 + m*dx, m = 0..count-1.
struct GridSamples {
  std::vector<double> values;
  std::vector<double> derivatives;
};
GridSamples evaluate_on_grid(const ParticleField& field, double x0, double dx, std::size_t count);

/// Explicit Euler step of the Jacobian ODE dJ/dt = (d_x v)(Phi) J applied to
/// the weights: omega_i *= 1 + dt * velocity_gradient[i].
/// Throws WeightCollapse if a weight becomes non-positive.
void transport_weights(ParticleField& field, std::span<const double> velocity_gradient, double dt);

/// Writes the CSV header `t,i,phi,omega,<amplitude_name>`.
void write_snapshot_header(std::ostream& out, std::string_view amplitude_name = "alpha");
/// One row per particle.
void write_snapshot_rows(std::ostream& out, double t, const ParticleField& field);

}  // namespace pbc
