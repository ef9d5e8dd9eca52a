#include "pbc/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "pbc/errors.hpp"

namespace pbc::quad {

namespace {

// QUADPACK G7/K15 abscissae and weights (non-negative half).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights belong to kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
  double kronrod;
  double gauss;
};

Estimate gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double pair = f(center - dx) + f(center + dx);
    k += kWgk[j] * pair;
    if (j % 2 == 1) g += kWg[j / 2] * pair;
  }
  return {k * half, g * half};
}

void recurse(const std::function<double(double)>& f, double a, double b, double tol, int depth,
             int max_depth, AdaptiveResult& out) {
  const Estimate est = gk15(f, a, b);
  const double err = std::abs(est.kronrod - est.gauss);
  if (!std::isfinite(est.kronrod)) {
    throw QuadratureNonConvergence("non-finite integrand value");
  }
  if (err <= tol) {
    out.value += est.kronrod;
    out.error_estimate += err;
    ++out.intervals;
    return;
  }
  if (depth >= max_depth) {
    std::ostringstream msg;
    msg << "depth limit " << max_depth << " reached on [" << a << ", " << b << "], error "
        << err << " > " << tol;
    throw QuadratureNonConvergence(msg.str());
  }
  const double mid = 0.5 * (a + b);
  recurse(f, a, mid, 0.5 * tol, depth + 1, max_depth, out);
  recurse(f, mid, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  if (!(abs_tol > 0.0)) throw InvalidArgument("quadrature tolerance must be positive");
  AdaptiveResult out;
  if (a == b) return out;
  recurse(f, a, b, abs_tol, 0, max_depth, out);
  return out;
}

double integrate_gauss_legendre(const std::function<double(double)>& f, double a, double b,
                                int cells) {
  if (cells < 1) throw InvalidArgument("need at least one cell");
  const double width = (b - a) / cells;
  double sum = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double mid = a + (c + 0.5) * width;
    double cell = 0.0;
    for (std::size_t g = 0; g < kGaussLegendre8Nodes.size(); ++g) {
      cell += kGaussLegendre8Weights[g] * f(mid + 0.5 * width * kGaussLegendre8Nodes[g]);
    }
    sum += 0.5 * width * cell;
  }
  return sum;
}

}  // namespace pbc::quad
