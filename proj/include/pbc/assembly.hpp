#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "pbc/banded.hpp"
#include "pbc/particles.hpp"

namespace pbc {

/// Matrix entries are formed for pairs closer than this many smoothing
/// lengths; beyond it the Gaussian overlaps are below 1e-21 of the diagonal.
inline constexpr double kMatrixBandRadius = 10.0;

/// Relative diagonal shift used when factorizing mass-type matrices.
inline constexpr double kMassRegularization = 1e-8;

/// Composite 8-point Gauss-Legendre rule on cells of length eps/2 aligned to
/// integer multiples of the cell length, covering every particle support,
/// together with the kernel value of each particle at the nodes inside its
/// support. This is the workhorse for every integral that has no closed form.
class NodalKernelTable {
 public:
  /// `extra_lo`/`extra_hi` widen the node range (e.g. to cover a target function).
  explicit NodalKernelTable(const ParticleField& field, double extra_lo = 0.0,
                            double extra_hi = 0.0);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t particle_count() const { return first_.size(); }

  /// y_h at every node for the given amplitudes.
  std::vector<double> sample(std::span<const double> amplitudes) const;
  /// d/dx y_h at every node.
  std::vector<double> sample_dx(std::span<const double> amplitudes) const;
  /// out_j = sum_q w_q g_q delta_eps(x_q - Phi_j), i.e. <g, delta_j>_H.
  std::vector<double> project(std::span<const double> nodal) const;
  /// Same as project with the integrand g evaluated from a function.
  std::vector<double> project(const std::function<double(double)>& g) const;
  /// sum_q w_q g_q.
  double integrate(std::span<const double> nodal) const;

 private:
  double epsilon_ = 1.0;
  std::vector<double> positions_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<std::size_t> first_;   // first node inside the support of particle i
  std::vector<std::size_t> offset_;  // start of particle i's block in values_
  std::vector<std::size_t> count_;
  std::vector<double> values_;
};

/// Galerkin matrices in the span of delta_eps(. - Phi_i).
struct GalerkinMatrices {
  SymmetricBandMatrix mass;       ///< <delta_i, delta_j>_H
  SymmetricBandMatrix stiffness;  ///< <delta_i', delta_j'>_H
  SymmetricBandMatrix kernel;     ///< delta_eps(Phi_i - Phi_j), for point values at particles
  std::vector<double> load_chi;   ///< <chi, delta_j>_H
  std::shared_ptr<const NodalKernelTable> quadrature;
};

/// Closed-form mass and stiffness entries, load vector by the nodal rule
/// (left empty when `chi` is empty).
GalerkinMatrices assemble(const ParticleField& field, const std::function<double(double)>& chi);

/// <chi, delta_j>_H by adaptive Gauss-Kronrod per particle (reference path for the load vector).
std::vector<double> load_vector_adaptive(const ParticleField& field,
                                         const std::function<double(double)>& chi, double tol);

/// Point values of y_h and d/dx y_h at the particle positions.
struct ParticleSamples {
  std::vector<double> values;
  std::vector<double> derivatives;
};
ParticleSamples sample_at_particles(const ParticleField& field, const GalerkinMatrices& matrices);

/// c_j = <y_h d_x v_h, delta_j>_H. Both fields must share positions and kernel.
std::vector<double> convection_apply(const ParticleField& field_y, const ParticleField& field_v);
std::vector<double> convection_apply(const NodalKernelTable& table,
                                     std::span<const double> y_amplitudes,
                                     std::span<const double> v_amplitudes);

/// Convection seen from test functions moving with velocity `particle_velocity`:
/// <(y_h - V_j) d_x v_h, delta_j>_H.
std::vector<double> relative_convection(const NodalKernelTable& table,
                                        std::span<const double> y_amplitudes,
                                        std::span<const double> v_amplitudes,
                                        std::span<const double> particle_velocity);

/// |alpha^T c(y, y)| / max(1, ||y_h||_H^2).
double skew_symmetry_defect(const ParticleField& field);

/// Throws InvalidArgument if the two fields do not share positions and kernel.
void require_same_layout(const ParticleField& a, const ParticleField& b);

}  // namespace pbc
