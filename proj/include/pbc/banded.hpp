#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pbc {

/// Symmetric band matrix kept in LAPACK upper band storage.
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(std::size_t n, std::size_t bandwidth);

  std::size_t size() const { return n_; }
  /// Number of stored super-diagonals.
  std::size_t bandwidth() const { return kd_; }

  /// Entry (i, j); zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;
  /// Stores entry (i, j) and, implicitly, (j, i). Requires |i - j| <= bandwidth.
  void set(std::size_t i, std::size_t j, double value);

  std::vector<double> multiply(std::span<const double> x) const;
  /// x^T A x
  double quadratic_form(std::span<const double> x) const;

  /// this + scale * other (same size and bandwidth).
  SymmetricBandMatrix plus_scaled(const SymmetricBandMatrix& other, double scale) const;

  const std::vector<double>& storage() const { return ab_; }

 private:
  std::size_t index(std::size_t row, std::size_t col) const { return kd_ + row - col + col * (kd_ + 1); }

  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> ab_;
};

/// Band Cholesky factorization of A + shift * I.
///
/// The shift regularizes Gram matrices of strongly overlapping Gaussians,
/// whose smallest eigenvalues fall far below double precision.
class BandCholesky {
 public:
  /// Throws SingularMass if LAPACK reports a non-positive pivot.
  BandCholesky(const SymmetricBandMatrix& a, double shift);

  std::vector<double> solve(std::span<const double> rhs) const;
  /// Solve followed by `sweeps` residual corrections against the unshifted
  /// matrix `a`, which removes the shift bias on well-conditioned modes.
  std::vector<double> solve_refined(const SymmetricBandMatrix& a, std::span<const double> rhs,
                                    int sweeps = 1) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_ = 0;
  std::size_t kd_ = 0;
  std::vector<double> factor_;
};

/// Shift used for mass-type matrices: `relative` times the largest absolute row sum.
double regularization_shift(const SymmetricBandMatrix& a, double relative);

}  // namespace pbc
