#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fockop {

using Complex = std::complex<double>;

// Points of C^n. <z, w> = sum_i z_i conj(w_i).
using CVector = std::vector<Complex>;

Complex inner(std::span<const Complex> z, std::span<const Complex> w);
double norm_sq(std::span<const Complex> z);
double norm(std::span<const Complex> z);

/// Dense square complex matrix, row-major.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(std::size_t n);
  /// Throws DimensionError unless entries.size() == n * n.
  CMatrix(std::size_t n, std::vector<Complex> entries);

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const double> d);
  static CMatrix diagonal(std::span<const Complex> d);
  /// Builds from rows x cols entries; non-square shapes are a DimensionError.
  static CMatrix from_rows(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  std::size_t dim() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const Complex> entries() const { return a_; }

  CMatrix adjoint() const;
  CVector apply(std::span<const Complex> z) const;
  CVector column(std::size_t j) const;
  bool is_zero() const;

  friend CMatrix operator*(const CMatrix& x, const CMatrix& y);
  friend CMatrix operator+(const CMatrix& x, const CMatrix& y);
  friend CMatrix operator-(const CMatrix& x, const CMatrix& y);

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

/// Largest entrywise modulus of x - y.
double max_abs_diff(const CMatrix& x, const CMatrix& y);

/// A = V * diag(sigma) * U with V, U unitary. Note the second factor is U,
/// not U^*: column j of V and row j of U form the j-th singular pair.
struct SvdTriple {
  CMatrix V;
  std::vector<double> sigma;      // non-increasing; snapped (see svd)
  std::vector<double> sigma_raw;  // before snapping to 0 / 1
  CMatrix U;
  int rank_s = 0;
  double rank_tol = 1e-10;
  int sweeps = 0;

  CMatrix reconstruct() const;
};

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr int kMaxJacobiSweeps = 200;

/// One-sided Jacobi SVD.
///
/// Singular values are sorted descending; ties (within rank_tol) are ordered
/// lexicographically by the corresponding column of V. Each column of V is
/// given a canonical phase (first significant entry real positive). Values
/// within rank_tol of 1 are snapped to exactly 1 and values at or below
/// rank_tol * max(sigma_0, 1) are set to 0 and excluded from rank_s.
///
/// Throws NumericalError if the sweep cap is exceeded, DomainError if
/// rank_tol is outside (0, 1).
SvdTriple svd(const CMatrix& a, double rank_tol = kDefaultRankTol);

double spectral_norm(const CMatrix& a);

/// True iff max |(A A^*)_{ij} - delta_ij| <= tol.
bool is_unitary(const CMatrix& a, double tol);

/// Product of the first rank_s singular values. DomainError when rank_s == 0.
double head_det_modulus(const SvdTriple& t);

}  // namespace fockop
