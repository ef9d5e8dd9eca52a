#pragma once

#include <array>
#include <functional>

namespace pbc::quad {

/// 8-point Gauss-Legendre rule on [-1, 1].
inline constexpr std::array<double, 8> kGaussLegendre8Nodes = {
    -0.960289856497536231683560868569473, -0.796666477413626739591553936475830,
    -0.525532409916328985817739049189246, -0.183434642495649804939476142360184,
    0.183434642495649804939476142360184,  0.525532409916328985817739049189246,
    0.796666477413626739591553936475830,  0.960289856497536231683560868569473};
inline constexpr std::array<double, 8> kGaussLegendre8Weights = {
    0.101228536290376259152531354309962, 0.222381034453374470544355994426241,
    0.313706645877887287337962201986601, 0.362683783378361982965150449277196,
    0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
    0.222381034453374470544355994426241, 0.101228536290376259152531354309962};

inline constexpr int kDefaultMaxDepth = 30;

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
};

/// Recursive 7/15-point Gauss-Kronrod quadrature. An interval is accepted
/// once |K15 - G7| is below its share of `abs_tol`; bisecting beyond
/// `max_depth` levels throws QuadratureNonConvergence.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth = kDefaultMaxDepth);

/// Composite 8-point Gauss-Legendre over `cells` equal sub-intervals.
double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int cells);

}  // namespace pbc::quad
