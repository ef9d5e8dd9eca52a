#include "pbc/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "pbc/errors.hpp"

namespace pbc {

SymmetricBandMatrix::SymmetricBandMatrix(std::size_t n, std::size_t bandwidth)
    : n_(n), kd_(std::min(bandwidth, n == 0 ? 0 : n - 1)), ab_((kd_ + 1) * n, 0.0) {}

double SymmetricBandMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) return 0.0;
  return ab_[index(i, j)];
}

void SymmetricBandMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i > j) std::swap(i, j);
  if (j >= n_ || j - i > kd_) throw InvalidArgument("band matrix entry out of band");
  ab_[index(i, j)] = value;
}

std::vector<double> SymmetricBandMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_) throw InvalidArgument("band matrix / vector size mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t first = j > kd_ ? j - kd_ : 0;
    const double* column = &ab_[index(first, j)];
    double acc = 0.0;
    for (std::size_t i = first; i < j; ++i, ++column) {
      acc += *column * x[i];
      y[i] += *column * x[j];
    }
    y[j] += acc + *column * x[j];
  }
  return y;
}

double SymmetricBandMatrix::quadratic_form(std::span<const double> x) const {
  const std::vector<double> ax = multiply(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) sum += x[i] * ax[i];
  return sum;
}

SymmetricBandMatrix SymmetricBandMatrix::plus_scaled(const SymmetricBandMatrix& other,
                                                     double scale) const {
  if (other.n_ != n_ || other.kd_ != kd_) throw InvalidArgument("band layouts differ");
  SymmetricBandMatrix out = *this;
  for (std::size_t k = 0; k < ab_.size(); ++k) out.ab_[k] += scale * other.ab_[k];
  return out;
}

std::vector<double> BandCholesky::solve_refined(const SymmetricBandMatrix& a,
                                                std::span<const double> rhs, int sweeps) const {
  std::vector<double> x = solve(rhs);
  for (int s = 0; s < sweeps; ++s) {
    std::vector<double> r = a.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    const std::vector<double> dx = solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  }
  return x;
}

double regularization_shift(const SymmetricBandMatrix& a, double relative) {
  const std::size_t n = a.size();
  std::vector<double> row_sum(n, 0.0);
  const std::size_t kd = a.bandwidth();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t first = j > kd ? j - kd : 0;
    for (std::size_t i = first; i <= j; ++i) {
      const double v = std::abs(a(i, j));
      row_sum[i] += v;
      if (i != j) row_sum[j] += v;
    }
  }
  const double norm = n == 0 ? 0.0 : *std::max_element(row_sum.begin(), row_sum.end());
  return relative * norm;
}

BandCholesky::BandCholesky(const SymmetricBandMatrix& a, double shift)
    : n_(a.size()), kd_(a.bandwidth()), factor_(a.storage()) {
  for (std::size_t j = 0; j < n_; ++j) factor_[kd_ + j * (kd_ + 1)] += shift;
  const lapack_int info =
      LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', static_cast<lapack_int>(n_),
                     static_cast<lapack_int>(kd_), factor_.data(), static_cast<lapack_int>(kd_ + 1));
  if (info != 0) {
    throw SingularMass("band Cholesky failed (LAPACK info " + std::to_string(info) +
                       "), near-coincident particles?");
  }
}

std::vector<double> BandCholesky::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw InvalidArgument("right-hand side size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  const lapack_int info = LAPACKE_dpbtrs(
      LAPACK_COL_MAJOR, 'U', static_cast<lapack_int>(n_), static_cast<lapack_int>(kd_), 1,
      factor_.data(), static_cast<lapack_int>(kd_ + 1), x.data(), static_cast<lapack_int>(n_));
  if (info != 0) throw SingularMass("band Cholesky solve failed");
  return x;
}

}  // namespace pbc
