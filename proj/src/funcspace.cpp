#include "fockop/funcspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "fockop/errors.hpp"

namespace fockop {

int total_degree(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

namespace {

bool key_less(const Term& x, const Term& y) {
  if (x.power != y.power) return x.power < y.power;
  for (std::size_t i = 0; i < x.freq.size(); ++i) {
    if (x.freq[i].real() != y.freq[i].real()) return x.freq[i].real() < y.freq[i].real();
    if (x.freq[i].imag() != y.freq[i].imag()) return x.freq[i].imag() < y.freq[i].imag();
  }
  return false;
}

bool freq_close(const CVector& x, const CVector& y, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i].real() - y[i].real()) > tol || std::abs(x[i].imag() - y[i].imag()) > tol)
      return false;
  return true;
}

void check_cap(std::size_t count, std::size_t cap, const char* what) {
  if (count > cap)
    throw ResourceError(std::string(what) + ": " + std::to_string(count) +
                        " terms exceeds cap " + std::to_string(cap));
}

Complex ipow(Complex z, int k) {
  Complex r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

using Poly = std::map<MultiIndex, Complex>;

Poly poly_mul(const Poly& x, const Poly& y, std::size_t cap) {
  Poly r;
  for (const auto& [ax, cx] : x)
    for (const auto& [ay, cy] : y) {
      MultiIndex a = ax;
      for (std::size_t i = 0; i < a.size(); ++i) a[i] += ay[i];
      r[a] += cx * cy;
    }
  check_cap(r.size(), cap, "compose_affine");
  return r;
}

}  // namespace

ExpPoly::ExpPoly(std::size_t n) : n_(n) {}

ExpPoly::ExpPoly(std::size_t n, std::vector<Term> terms) : n_(n) {
  for (const auto& t : terms) {
    if (t.power.size() != n || t.freq.size() != n)
      throw DimensionError("ExpPoly: term has wrong dimension (expected " + std::to_string(n) + ")");
    for (int a : t.power)
      if (a < 0) throw DomainError("ExpPoly: negative exponent");
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
      throw NumericalError("ExpPoly: non-finite coefficient");
  }
  std::sort(terms.begin(), terms.end(), key_less);

  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (auto& t : terms) {
    bool done = false;
    for (std::size_t k = merged.size(); k-- > 0;) {
      Term& m = merged[k];
      if (m.power != t.power) break;
      if (n > 0 && t.freq[0].real() - m.freq[0].real() > kFreqMergeTol) break;
      if (freq_close(m.freq, t.freq, kFreqMergeTol)) {
        m.coeff += t.coeff;
        done = true;
        break;
      }
    }
    if (!done) merged.push_back(std::move(t));
  }

  double cmax = 0.0;
  for (const auto& t : merged) cmax = std::max(cmax, std::abs(t.coeff));
  const double cut = kCoeffDropRel * cmax;
  for (auto& t : merged)
    if (t.coeff != Complex(0.0) && std::abs(t.coeff) >= cut) terms_.push_back(std::move(t));
}

ExpPoly ExpPoly::constant(std::size_t n, Complex c) {
  return ExpPoly(n, {Term{c, MultiIndex(n, 0), CVector(n, Complex(0.0))}});
}

ExpPoly ExpPoly::monomial(std::size_t n, Complex coeff, MultiIndex power) {
  return ExpPoly(n, {Term{coeff, std::move(power), CVector(n, Complex(0.0))}});
}

ExpPoly ExpPoly::coordinate(std::size_t n, std::size_t i) {
  if (i >= n) throw DimensionError("ExpPoly::coordinate: index out of range");
  MultiIndex a(n, 0);
  a[i] = 1;
  return monomial(n, 1.0, std::move(a));
}

int ExpPoly::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, total_degree(t.power));
  return d;
}

Complex ExpPoly::operator()(std::span<const Complex> z) const {
  if (z.size() != n_) throw DimensionError("eval: point has dimension " + std::to_string(z.size()) +
                                           ", function has " + std::to_string(n_));
  Complex s = 0.0;
  for (const auto& t : terms_) {
    Complex v = t.coeff;
    Complex e = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (t.power[i]) v *= ipow(z[i], t.power[i]);
      e += z[i] * std::conj(t.freq[i]);
    }
    s += v * std::exp(e);
  }
  return s;
}

ExpPoly ExpPoly::scaled(Complex s) const {
  std::vector<Term> t = terms_;
  for (auto& x : t) x.coeff *= s;
  return ExpPoly(n_, std::move(t));
}

ExpPoly ExpPoly::operator+(const ExpPoly& g) const {
  if (g.n_ != n_) throw DimensionError("ExpPoly sum: dimension mismatch");
  std::vector<Term> t = terms_;
  t.insert(t.end(), g.terms_.begin(), g.terms_.end());
  return ExpPoly(n_, std::move(t));
}

ExpPoly ExpPoly::operator-(const ExpPoly& g) const { return *this + g.scaled(-1.0); }

std::optional<CVector> ExpPoly::common_frequency() const {
  if (terms_.empty()) return CVector(n_, Complex(0.0));
  for (const auto& t : terms_)
    if (!freq_close(t.freq, terms_.front().freq, kFreqMergeTol)) return std::nullopt;
  return terms_.front().freq;
}

ExpPoly canonicalize(const ExpPoly& f) { return ExpPoly(f.dim(), f.terms()); }

bool same_form(const ExpPoly& f, const ExpPoly& g, double tol) {
  if (f.dim() != g.dim() || f.terms().size() != g.terms().size()) return false;
  for (std::size_t k = 0; k < f.terms().size(); ++k) {
    const Term& x = f.terms()[k];
    const Term& y = g.terms()[k];
    if (x.power != y.power || !freq_close(x.freq, y.freq, tol)) return false;
    if (std::abs(x.coeff - y.coeff) > tol * std::max(1.0, std::abs(x.coeff))) return false;
  }
  return true;
}

Complex eval(const ExpPoly& f, std::span<const Complex> z) { return f(z); }

ExpPoly kernel(std::span<const Complex> w) {
  const std::size_t n = w.size();
  return ExpPoly(n, {Term{1.0, MultiIndex(n, 0), CVector(w.begin(), w.end())}});
}

ExpPoly normalized_kernel(std::span<const Complex> w) {
  const std::size_t n = w.size();
  return ExpPoly(n, {Term{std::exp(-0.5 * norm_sq(w)), MultiIndex(n, 0), CVector(w.begin(), w.end())}});
}

AffineMap::AffineMap(CMatrix a, CVector shift) : A(std::move(a)), b(std::move(shift)) {
  if (A.dim() != b.size())
    throw DimensionError("AffineMap: matrix is " + std::to_string(A.dim()) + "x" +
                         std::to_string(A.dim()) + " but shift has length " +
                         std::to_string(b.size()));
}

AffineMap AffineMap::identity(std::size_t n) {
  return AffineMap(CMatrix::identity(n), CVector(n, Complex(0.0)));
}

CVector AffineMap::operator()(std::span<const Complex> z) const {
  CVector r = A.apply(z);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

AffineMap compose(const AffineMap& outer, const AffineMap& inner) {
  if (outer.dim() != inner.dim()) throw DimensionError("compose: dimension mismatch");
  return AffineMap(outer.A * inner.A, outer(inner.b));
}

ExpPoly compose_affine(const ExpPoly& f, const AffineMap& phi, std::size_t term_cap) {
  const std::size_t n = f.dim();
  if (phi.dim() != n) throw DimensionError("compose_affine: dimension mismatch");
  const CMatrix adj = phi.A.adjoint();

  // Linear forms (A z + b)_i as polynomials, and their powers on demand.
  std::vector<std::vector<Poly>> powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    Poly lin;
    for (std::size_t j = 0; j < n; ++j)
      if (phi.A(i, j) != Complex(0.0)) {
        MultiIndex a(n, 0);
        a[j] = 1;
        lin[a] = phi.A(i, j);
      }
    if (phi.b[i] != Complex(0.0)) lin[MultiIndex(n, 0)] = phi.b[i];
    powers[i].push_back(Poly{{MultiIndex(n, 0), 1.0}});
    powers[i].push_back(std::move(lin));
  }
  const auto power_of = [&](std::size_t i, int k) -> const Poly& {
    while (static_cast<int>(powers[i].size()) <= k)
      powers[i].push_back(poly_mul(powers[i].back(), powers[i][1], term_cap));
    return powers[i][static_cast<std::size_t>(k)];
  };

  std::vector<Term> out;
  for (const auto& t : f.terms()) {
    const CVector freq = adj.apply(t.freq);
    const Complex scale = t.coeff * std::exp(inner(phi.b, t.freq));
    Poly p{{MultiIndex(n, 0), 1.0}};
    for (std::size_t i = 0; i < n; ++i)
      if (t.power[i] > 0) p = poly_mul(p, power_of(i, t.power[i]), term_cap);
    for (const auto& [a, c] : p)
      if (c != Complex(0.0)) out.push_back(Term{scale * c, a, freq});
    check_cap(out.size(), term_cap, "compose_affine");
  }
  return ExpPoly(n, std::move(out));
}

ExpPoly multiply(const ExpPoly& f, const ExpPoly& g, std::size_t term_cap) {
  if (f.dim() != g.dim()) throw DimensionError("multiply: dimension mismatch");
  const std::size_t n = f.dim();
  check_cap(f.terms().size() * g.terms().size(), term_cap, "multiply");
  std::vector<Term> out;
  out.reserve(f.terms().size() * g.terms().size());
  for (const auto& x : f.terms())
    for (const auto& y : g.terms()) {
      Term t{x.coeff * y.coeff, x.power, x.freq};
      for (std::size_t i = 0; i < n; ++i) {
        t.power[i] += y.power[i];
        t.freq[i] += y.freq[i];
      }
      out.push_back(std::move(t));
    }
  return ExpPoly(n, std::move(out));
}

namespace {

// Substitutes values for coordinates [lo, lo + vals.size()).
ExpPoly substitute(const ExpPoly& f, std::size_t lo, std::span<const Complex> vals) {
  const std::size_t n = f.dim();
  const std::size_t k = vals.size();
  const std::size_t m = n - k;
  std::vector<Term> out;
  out.reserve(f.terms().size());
  for (const auto& t : f.terms()) {
    Complex c = t.coeff;
    Complex e = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      c *= ipow(vals[i], t.power[lo + i]);
      e += vals[i] * std::conj(t.freq[lo + i]);
    }
    Term r{c * std::exp(e), MultiIndex(), CVector()};
    r.power.reserve(m);
    r.freq.reserve(m);
    for (std::size_t i = 0; i < n; ++i)
      if (i < lo || i >= lo + k) {
        r.power.push_back(t.power[i]);
        r.freq.push_back(t.freq[i]);
      }
    out.push_back(std::move(r));
  }
  return ExpPoly(m, std::move(out));
}

}  // namespace

ExpPoly slice_head(const ExpPoly& f, std::span<const Complex> prefix) {
  if (prefix.empty() || prefix.size() >= f.dim())
    throw DomainError("slice_head: prefix length " + std::to_string(prefix.size()) +
                      " must lie in (0, " + std::to_string(f.dim()) + ")");
  return substitute(f, 0, prefix);
}

ExpPoly slice_tail(const ExpPoly& f, std::span<const Complex> suffix) {
  if (suffix.empty() || suffix.size() >= f.dim())
    throw DomainError("slice_tail: suffix length " + std::to_string(suffix.size()) +
                      " must lie in (0, " + std::to_string(f.dim()) + ")");
  return substitute(f, f.dim() - suffix.size(), suffix);
}

ExpPoly apply_wco(const ExpPoly& psi, const AffineMap& phi, const ExpPoly& f, std::size_t term_cap) {
  return multiply(psi, compose_affine(f, phi, term_cap), term_cap);
}

}  // namespace fockop
