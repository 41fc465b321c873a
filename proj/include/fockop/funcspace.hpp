#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fockop/linalg.hpp"

namespace fockop {

using MultiIndex = std::vector<int>;

inline constexpr double kFreqMergeTol = 1e-12;
inline constexpr double kCoeffDropRel = 1e-14;
inline constexpr std::size_t kDefaultTermCap = 1'000'000;

int total_degree(const MultiIndex& alpha);

/// coeff * z^power * exp(<z, freq>)
struct Term {
  Complex coeff;
  MultiIndex power;
  CVector freq;
};

/// Finite sum of terms coeff * z^alpha * e^{<z, c>} on C^n, kept in
/// canonical form: terms sorted by (power, freq), equal keys merged
/// (freq compared within kFreqMergeTol per component), coefficients below
/// kCoeffDropRel times the largest dropped.
class ExpPoly {
 public:
  ExpPoly() = default;
  explicit ExpPoly(std::size_t n);
  /// Canonicalizes. Throws DimensionError on inconsistent term shapes or
  /// DomainError on negative exponents.
  ExpPoly(std::size_t n, std::vector<Term> terms);

  static ExpPoly constant(std::size_t n, Complex c);
  static ExpPoly monomial(std::size_t n, Complex coeff, MultiIndex power);
  /// z_i as a function on C^n.
  static ExpPoly coordinate(std::size_t n, std::size_t i);

  std::size_t dim() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_degree() const;

  Complex operator()(std::span<const Complex> z) const;

  ExpPoly scaled(Complex s) const;
  ExpPoly operator+(const ExpPoly& g) const;
  ExpPoly operator-(const ExpPoly& g) const;

  /// The common frequency if every term shares one (within kFreqMergeTol).
  std::optional<CVector> common_frequency() const;

 private:
  std::size_t n_ = 0;
  std::vector<Term> terms_;
};

ExpPoly canonicalize(const ExpPoly& f);

/// Exact structural equality of canonical forms up to tol on coefficients
/// and frequencies.
bool same_form(const ExpPoly& f, const ExpPoly& g, double tol = 1e-12);

Complex eval(const ExpPoly& f, std::span<const Complex> z);

ExpPoly kernel(std::span<const Complex> w);
ExpPoly normalized_kernel(std::span<const Complex> w);

/// phi(z) = A z + b.
struct AffineMap {
  CMatrix A;
  CVector b;

  AffineMap() = default;
  /// Throws DimensionError if b.size() != A.dim().
  AffineMap(CMatrix a, CVector shift);

  static AffineMap identity(std::size_t n);
  std::size_t dim() const { return b.size(); }
  CVector operator()(std::span<const Complex> z) const;
};

/// outer o inner.
AffineMap compose(const AffineMap& outer, const AffineMap& inner);

ExpPoly compose_affine(const ExpPoly& f, const AffineMap& phi,
                       std::size_t term_cap = kDefaultTermCap);
ExpPoly multiply(const ExpPoly& f, const ExpPoly& g, std::size_t term_cap = kDefaultTermCap);

/// Fixes the first s = prefix.size() coordinates; result lives on C^{n-s}.
ExpPoly slice_head(const ExpPoly& f, std::span<const Complex> prefix);
/// Fixes the last n - s = suffix.size() coordinates; result lives on C^s.
ExpPoly slice_tail(const ExpPoly& f, std::span<const Complex> suffix);

/// psi * (f o phi).
ExpPoly apply_wco(const ExpPoly& psi, const AffineMap& phi, const ExpPoly& f,
                  std::size_t term_cap = kDefaultTermCap);

}  // namespace fockop
