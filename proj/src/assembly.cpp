#include "pbc/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pbc/errors.hpp"
#include "pbc/quadrature.hpp"

namespace pbc {

namespace {

constexpr std::size_t kNodesPerCell = quad::kGaussLegendre8Nodes.size();
constexpr double kCellsPerEpsilon = 2.0;

}  // namespace

NodalKernelTable::NodalKernelTable(const ParticleField& field, double extra_lo, double extra_hi)
    : epsilon_(field.kernel.epsilon), positions_(field.positions) {
  const std::size_t n = field.size();
  if (n == 0) throw InvalidArgument("empty particle field");
  const double eps = epsilon_;
  const double cell = eps / kCellsPerEpsilon;
  const double radius = field.kernel.support();

  double lo = positions_.front() - radius;
  double hi = positions_.back() + radius;
  if (extra_lo < extra_hi) {
    lo = std::min(lo, extra_lo);
    hi = std::max(hi, extra_hi);
  }
  const auto c_min = static_cast<long>(std::floor(lo / cell));
  const auto c_max = static_cast<long>(std::ceil(hi / cell));
  const auto cells = static_cast<std::size_t>(c_max - c_min);

  nodes_.resize(cells * kNodesPerCell);
  weights_.resize(cells * kNodesPerCell);
  for (std::size_t c = 0; c < cells; ++c) {
    const double left = static_cast<double>(c_min + static_cast<long>(c)) * cell;
    for (std::size_t g = 0; g < kNodesPerCell; ++g) {
      nodes_[c * kNodesPerCell + g] = left + 0.5 * cell * (1.0 + quad::kGaussLegendre8Nodes[g]);
      weights_[c * kNodesPerCell + g] = 0.5 * cell * quad::kGaussLegendre8Weights[g];
    }
  }

  first_.resize(n);
  offset_.resize(n);
  count_.resize(n);
  std::size_t total = 0;
  std::vector<long> cell_lo(n), cell_hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    cell_lo[i] = std::max(c_min, static_cast<long>(std::floor((positions_[i] - radius) / cell)));
    cell_hi[i] = std::min(c_max, static_cast<long>(std::ceil((positions_[i] + radius) / cell)));
    first_[i] = static_cast<std::size_t>(cell_lo[i] - c_min) * kNodesPerCell;
    count_[i] = static_cast<std::size_t>(cell_hi[i] - cell_lo[i]) * kNodesPerCell;
    offset_[i] = total;
    total += count_[i];
  }
  values_.resize(total);

  // For a fixed Gauss point the nodes of consecutive cells are eps/2 apart, so
  // exp(-z^2) follows a multiplicative recurrence in the cell index.
  const double norm = std::numbers::inv_sqrtpi / eps;
  const double step = cell / eps;
  const double q = std::exp(-2.0 * step * step);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = positions_[i];
    const long center =
        std::clamp(static_cast<long>(std::floor(phi / cell)), cell_lo[i], cell_hi[i] - 1);
    double* block = values_.data() + offset_[i];
    for (std::size_t g = 0; g < kNodesPerCell; ++g) {
      const double offset_in_cell = 0.5 * cell * (1.0 + quad::kGaussLegendre8Nodes[g]);
      const double zc = (static_cast<double>(center) * cell + offset_in_cell - phi) / eps;
      const double vc = norm * std::exp(-zc * zc);
      block[static_cast<std::size_t>(center - cell_lo[i]) * kNodesPerCell + g] = vc;
      double value = vc;
      double ratio = std::exp(-2.0 * zc * step - step * step);
      for (long c = center + 1; c < cell_hi[i]; ++c) {
        value *= ratio;
        ratio *= q;
        block[static_cast<std::size_t>(c - cell_lo[i]) * kNodesPerCell + g] = value;
      }
      value = vc;
      ratio = std::exp(2.0 * zc * step - step * step);
      for (long c = center - 1; c >= cell_lo[i]; --c) {
        value *= ratio;
        ratio *= q;
        block[static_cast<std::size_t>(c - cell_lo[i]) * kNodesPerCell + g] = value;
      }
    }
  }
}

std::vector<double> NodalKernelTable::sample(std::span<const double> amplitudes) const {
  if (amplitudes.size() != particle_count()) throw InvalidArgument("amplitude count mismatch");
  std::vector<double> out(nodes_.size(), 0.0);
  for (std::size_t i = 0; i < particle_count(); ++i) {
    const double a = amplitudes[i];
    if (a == 0.0) continue;
    const double* v = values_.data() + offset_[i];
    double* y = out.data() + first_[i];
    for (std::size_t k = 0; k < count_[i]; ++k) y[k] += a * v[k];
  }
  return out;
}

std::vector<double> NodalKernelTable::sample_dx(std::span<const double> amplitudes) const {
  if (amplitudes.size() != particle_count()) throw InvalidArgument("amplitude count mismatch");
  std::vector<double> out(nodes_.size(), 0.0);
  const double scale = -2.0 / (epsilon_ * epsilon_);
  for (std::size_t i = 0; i < particle_count(); ++i) {
    const double a = amplitudes[i];
    if (a == 0.0) continue;
    const double phi = positions_[i];
    const double* v = values_.data() + offset_[i];
    const double* x = nodes_.data() + first_[i];
    double* y = out.data() + first_[i];
    for (std::size_t k = 0; k < count_[i]; ++k) y[k] += a * scale * (x[k] - phi) * v[k];
  }
  return out;
}

std::vector<double> NodalKernelTable::project(std::span<const double> nodal) const {
  if (nodal.size() != nodes_.size()) throw InvalidArgument("nodal vector size mismatch");
  std::vector<double> out(particle_count(), 0.0);
  for (std::size_t j = 0; j < particle_count(); ++j) {
    const double* v = values_.data() + offset_[j];
    const double* w = weights_.data() + first_[j];
    const double* g = nodal.data() + first_[j];
    double acc = 0.0;
    for (std::size_t k = 0; k < count_[j]; ++k) acc += w[k] * g[k] * v[k];
    out[j] = acc;
  }
  return out;
}

std::vector<double> NodalKernelTable::project(const std::function<double(double)>& g) const {
  std::vector<double> nodal(nodes_.size());
  for (std::size_t q = 0; q < nodes_.size(); ++q) nodal[q] = g(nodes_[q]);
  return project(nodal);
}

double NodalKernelTable::integrate(std::span<const double> nodal) const {
  if (nodal.size() != nodes_.size()) throw InvalidArgument("nodal vector size mismatch");
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes_.size(); ++q) acc += weights_[q] * nodal[q];
  return acc;
}

GalerkinMatrices assemble(const ParticleField& field, const std::function<double(double)>& chi) {
  field.validate();
  const std::size_t n = field.size();
  const double eps = field.kernel.epsilon;
  const double band_radius = kMatrixBandRadius * eps;

  std::size_t kd = 0;
  for (std::size_t i = 0, j = 0; i < n; ++i) {
    j = std::max(j, i);
    while (j + 1 < n && field.positions[j + 1] - field.positions[i] <= band_radius) ++j;
    kd = std::max(kd, j - i);
  }

  GalerkinMatrices out;
  out.mass = SymmetricBandMatrix(n, kd);
  out.stiffness = SymmetricBandMatrix(n, kd);
  out.kernel = SymmetricBandMatrix(n, kd);
  const double mass_norm = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * eps);
  const double kernel_norm = std::numbers::inv_sqrtpi / eps;
  const double inv_eps2 = 1.0 / (eps * eps);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n && j - i <= kd; ++j) {
      const double d = field.positions[j] - field.positions[i];
      if (d > band_radius) break;
      // Products of two Gaussians of width eps integrate to a Gaussian of
      // variance eps^2 in the separation.
      const double e = std::exp(-0.5 * d * d * inv_eps2);
      const double m = mass_norm * e;
      out.mass.set(i, j, m);
      out.stiffness.set(i, j, m * inv_eps2 * (1.0 - d * d * inv_eps2));
      out.kernel.set(i, j, kernel_norm * e * e);
    }
  }
  out.quadrature = std::make_shared<const NodalKernelTable>(field);
  if (chi) out.load_chi = out.quadrature->project(chi);
  return out;
}

std::vector<double> load_vector_adaptive(const ParticleField& field,
                                         const std::function<double(double)>& chi, double tol) {
  field.validate();
  std::vector<double> out(field.size());
  const double radius = field.kernel.support();
  for (std::size_t j = 0; j < field.size(); ++j) {
    const double phi = field.positions[j];
    auto integrand = [&](double x) { return chi(x) * kernel_eval(field.kernel, x - phi); };
    out[j] = quad::integrate_adaptive(integrand, phi - radius, phi, tol).value +
             quad::integrate_adaptive(integrand, phi, phi + radius, tol).value;
  }
  return out;
}

ParticleSamples sample_at_particles(const ParticleField& field, const GalerkinMatrices& matrices) {
  const std::size_t n = field.size();
  if (matrices.kernel.size() != n) throw InvalidArgument("matrices do not match the field");
  const std::size_t kd = matrices.kernel.bandwidth();
  const double scale = -2.0 / (field.kernel.epsilon * field.kernel.epsilon);
  ParticleSamples out;
  out.values.assign(n, 0.0);
  out.derivatives.assign(n, 0.0);
  const auto& a = field.amplitudes;
  const auto& x = field.positions;
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] += a[i] * matrices.kernel(i, i);
    for (std::size_t j = i + 1; j < n && j - i <= kd; ++j) {
      const double k = matrices.kernel(i, j);
      if (k == 0.0) continue;
      const double dk = scale * (x[i] - x[j]) * k;  // kernel_grad(x_i - x_j)
      out.values[i] += a[j] * k;
      out.values[j] += a[i] * k;
      out.derivatives[i] += a[j] * dk;
      out.derivatives[j] -= a[i] * dk;
    }
  }
  return out;
}

void require_same_layout(const ParticleField& a, const ParticleField& b) {
  if (a.positions != b.positions || a.kernel.epsilon != b.kernel.epsilon) {
    throw InvalidArgument("fields must share positions and smoothing length");
  }
}

std::vector<double> convection_apply(const NodalKernelTable& table,
                                     std::span<const double> y_amplitudes,
                                     std::span<const double> v_amplitudes) {
  std::vector<double> y = table.sample(y_amplitudes);
  const std::vector<double> vx = table.sample_dx(v_amplitudes);
  for (std::size_t q = 0; q < y.size(); ++q) y[q] *= vx[q];
  return table.project(y);
}

std::vector<double> convection_apply(const ParticleField& field_y, const ParticleField& field_v) {
  field_y.validate();
  field_v.validate();
  require_same_layout(field_y, field_v);
  const NodalKernelTable table(field_y);
  return convection_apply(table, field_y.amplitudes, field_v.amplitudes);
}

std::vector<double> relative_convection(const NodalKernelTable& table,
                                        std::span<const double> y_amplitudes,
                                        std::span<const double> v_amplitudes,
                                        std::span<const double> particle_velocity) {
  if (particle_velocity.size() != table.particle_count()) {
    throw InvalidArgument("velocity count mismatch");
  }
  const std::vector<double> vx = table.sample_dx(v_amplitudes);
  std::vector<double> yvx = table.sample(y_amplitudes);
  for (std::size_t q = 0; q < yvx.size(); ++q) yvx[q] *= vx[q];
  std::vector<double> out = table.project(yvx);
  const std::vector<double> frame = table.project(vx);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] -= particle_velocity[j] * frame[j];
  return out;
}

double skew_symmetry_defect(const ParticleField& field) {
  field.validate();
  const NodalKernelTable table(field);
  const std::vector<double> c = convection_apply(table, field.amplitudes, field.amplitudes);
  double dot = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) dot += field.amplitudes[j] * c[j];
  std::vector<double> y = table.sample(field.amplitudes);
  for (double& v : y) v *= v;
  return std::abs(dot) / std::max(1.0, table.integrate(y));
}

}  // namespace pbc
