#pragma once

#include <cmath>
#include <functional>
#include <numbers>

namespace pbc {

enum class KernelKind { Gaussian };

/// Contributions of a particle are dropped beyond this many smoothing lengths.
/// The Gaussian is ~1e-174 of its peak there.
inline constexpr double kSupportRadius = 20.0;

/// Smoothing kernel delta_eps(x) = eps^-1 zeta(x / eps) together with the
/// moment order it claims.
struct KernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  double epsilon = 1.0;
  int order_r = 2;

  /// Throws InvalidArgument when the invariants do not hold.
  void validate() const;
  double support() const { return kSupportRadius * epsilon; }

  static KernelSpec gaussian(double epsilon);
};

/// delta_eps(x) = exp(-x^2 / eps^2) / (sqrt(pi) eps).
inline double kernel_eval(const KernelSpec& spec, double x) {
  const double z = x / spec.epsilon;
  return std::exp(-z * z) * (std::numbers::inv_sqrtpi / spec.epsilon);
}

/// d/dx delta_eps(x) = -2 x / eps^2 * delta_eps(x).
inline double kernel_grad(const KernelSpec& spec, double x) {
  return -2.0 * x / (spec.epsilon * spec.epsilon) * kernel_eval(spec, x);
}

struct MomentReport {
  double zeroth = 0.0;     ///< int delta
  double first = 0.0;      ///< int x delta
  double second = 0.0;     ///< int x^2 delta
  double r_th_abs = 0.0;   ///< int |x|^r |delta|
  bool pass = false;
};

/// Moments of `spec`'s kernel by adaptive quadrature over [-20 eps, 20 eps].
/// pass iff |zeroth - 1| < quad_tol, |first| < quad_tol and r_th_abs finite.
MomentReport verify_moments(const KernelSpec& spec, double quad_tol);

/// Same check for an arbitrary density with the given smoothing length and
/// claimed order (used to exercise kernels that break the conditions).
MomentReport verify_moments(const std::function<double(double)>& density, double epsilon,
                            int order_r, double quad_tol);

}  // namespace pbc
