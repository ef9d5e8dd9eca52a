#include "pbc/kernels.hpp"

#include <algorithm>
#include <string>

#include "pbc/errors.hpp"
#include "pbc/quadrature.hpp"

namespace pbc {

void KernelSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("kernel epsilon must be positive and finite, got " +
                          std::to_string(epsilon));
  }
  if (order_r < 1) throw InvalidArgument("kernel order must be >= 1");
  if (kind == KernelKind::Gaussian && order_r != 2) {
    throw InvalidArgument("the Gaussian kernel has moment order 2");
  }
}

KernelSpec KernelSpec::gaussian(double epsilon) {
  KernelSpec spec{KernelKind::Gaussian, epsilon, 2};
  spec.validate();
  return spec;
}

MomentReport verify_moments(const KernelSpec& spec, double quad_tol) {
  spec.validate();
  return verify_moments([&spec](double x) { return kernel_eval(spec, x); }, spec.epsilon,
                        spec.order_r, quad_tol);
}

MomentReport verify_moments(const std::function<double(double)>& density, double epsilon,
                            int order_r, double quad_tol) {
  if (!(quad_tol > 0.0)) throw InvalidArgument("quad_tol must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  const double radius = kSupportRadius * epsilon;
  // The integration itself has to be well below the acceptance threshold.
  const double tol = std::max(1e-3 * quad_tol, 1e-15);

  auto integrate = [&](const std::function<double(double)>& g, double scale) {
    // Split at the origin so both halves see a monotone integrand.
    const double t = tol * scale;
    return quad::integrate_adaptive(g, -radius, 0.0, t).value +
           quad::integrate_adaptive(g, 0.0, radius, t).value;
  };

  MomentReport r;
  r.zeroth = integrate(density, 1.0);
  r.first = integrate([&](double x) { return x * density(x); }, epsilon);
  r.second = integrate([&](double x) { return x * x * density(x); }, epsilon * epsilon);
  const double order = static_cast<double>(order_r);
  r.r_th_abs = integrate(
      [&](double x) { return std::pow(std::abs(x), order) * std::abs(density(x)); },
      std::pow(epsilon, order));
  r.pass = std::abs(r.zeroth - 1.0) < quad_tol && std::abs(r.first) < quad_tol &&
           std::isfinite(r.r_th_abs);
  return r;
}

}  // namespace pbc
