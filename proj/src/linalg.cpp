#include "fockop/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fockop/errors.hpp"

namespace fockop {

Complex inner(std::span<const Complex> z, std::span<const Complex> w) {
  if (z.size() != w.size()) throw DimensionError("inner: dimension mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += z[i] * std::conj(w[i]);
  return s;
}

double norm_sq(std::span<const Complex> z) {
  double s = 0.0;
  for (const auto& x : z) s += std::norm(x);
  return s;
}

double norm(std::span<const Complex> z) { return std::sqrt(norm_sq(z)); }

CMatrix::CMatrix(std::size_t n) : n_(n), a_(n * n, Complex(0.0)) {}

CMatrix::CMatrix(std::size_t n, std::vector<Complex> entries) : n_(n), a_(std::move(entries)) {
  if (a_.size() != n_ * n_) {
    throw DimensionError("CMatrix: expected " + std::to_string(n_ * n_) + " entries, got " +
                         std::to_string(a_.size()));
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const double> d) {
  CMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> d) {
  CMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMatrix CMatrix::from_rows(std::size_t rows, std::size_t cols, std::vector<Complex> entries) {
  if (rows != cols) {
    throw DimensionError("matrix must be square, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  return CMatrix(rows, std::move(entries));
}

CMatrix CMatrix::adjoint() const {
  CMatrix r(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

CVector CMatrix::apply(std::span<const Complex> z) const {
  if (z.size() != n_) throw DimensionError("CMatrix::apply: dimension mismatch");
  CVector r(n_, Complex(0.0));
  for (std::size_t i = 0; i < n_; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * z[j];
    r[i] = s;
  }
  return r;
}

CVector CMatrix::column(std::size_t j) const {
  CVector c(n_);
  for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
  return c;
}

bool CMatrix::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const Complex& x) { return x == Complex(0.0); });
}

CMatrix operator*(const CMatrix& x, const CMatrix& y) {
  if (x.n_ != y.n_) throw DimensionError("matrix product: dimension mismatch");
  const std::size_t n = x.n_;
  CMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex xik = x(i, k);
      for (std::size_t j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

CMatrix operator+(const CMatrix& x, const CMatrix& y) {
  if (x.n_ != y.n_) throw DimensionError("matrix sum: dimension mismatch");
  CMatrix r(x);
  for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] += y.a_[i];
  return r;
}

CMatrix operator-(const CMatrix& x, const CMatrix& y) {
  if (x.n_ != y.n_) throw DimensionError("matrix difference: dimension mismatch");
  CMatrix r(x);
  for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= y.a_[i];
  return r;
}

double max_abs_diff(const CMatrix& x, const CMatrix& y) {
  if (x.dim() != y.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < x.entries().size(); ++i)
    m = std::max(m, std::abs(x.entries()[i] - y.entries()[i]));
  return m;
}

CMatrix SvdTriple::reconstruct() const {
  const std::size_t n = V.dim();
  CMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += V(i, k) * sigma[k] * U(k, j);
      r(i, j) = s;
    }
  return r;
}

namespace {

// Column-major working storage for the Jacobi sweeps.
using Columns = std::vector<CVector>;

Complex column_inner(const CVector& x, const CVector& y) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

bool lex_less(const CVector& x, const CVector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].real() != y[i].real()) return x[i].real() < y[i].real();
    if (x[i].imag() != y[i].imag()) return x[i].imag() < y[i].imag();
  }
  return false;
}

// Orthonormal completion of the first `filled` columns of q.
void complete_basis(Columns& q, std::size_t filled) {
  const std::size_t n = q.size();
  for (std::size_t j = filled; j < n; ++j) {
    CVector best;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      CVector v(n, Complex(0.0));
      v[k] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t m = 0; m < j; ++m) {
          const Complex c = column_inner(q[m], v);
          for (std::size_t i = 0; i < n; ++i) v[i] -= c * q[m][i];
        }
      const double nv = norm(v);
      if (nv > best_norm + 1e-12) {
        best_norm = nv;
        best = std::move(v);
      }
    }
    for (auto& x : best) x /= best_norm;
    q[j] = std::move(best);
  }
}

}  // namespace

SvdTriple svd(const CMatrix& a, double rank_tol) {
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw DomainError("svd: rank_tol must lie in (0, 1)");
  const std::size_t n = a.dim();
  for (const auto& x : a.entries())
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      throw NumericalError("svd: non-finite matrix entry");

  Columns g(n, CVector(n)), w(n, CVector(n, Complex(0.0)));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) g[j][i] = a(i, j);
    w[j][j] = 1.0;
  }

  constexpr double eps = 1e-15;
  int sweeps = 0;
  bool rotated = n > 1;
  while (rotated) {
    if (sweeps == kMaxJacobiSweeps)
      throw NumericalError("svd: no convergence after " + std::to_string(kMaxJacobiSweeps) +
                           " Jacobi sweeps");
    ++sweeps;
    rotated = false;
    for (std::size_t j = 0; j + 1 < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        const double alpha = norm_sq(g[j]);
        const double beta = norm_sq(g[k]);
        const Complex gamma = column_inner(g[j], g[k]);
        const double mod = std::abs(gamma);
        if (mod == 0.0 || mod <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Complex phase = std::conj(gamma / mod);
        const double zeta = (beta - alpha) / (2.0 * mod);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const Complex gj = g[j][i], gk = phase * g[k][i];
          g[j][i] = c * gj - s * gk;
          g[k][i] = s * gj + c * gk;
          const Complex wj = w[j][i], wk = phase * w[k][i];
          w[j][i] = c * wj - s * wk;
          w[k][i] = s * wj + c * wk;
        }
      }
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) sv[j] = norm(g[j]);
  const double smax = n ? *std::max_element(sv.begin(), sv.end()) : 0.0;
  const double zero_cut = rank_tol * std::max(smax, 1.0);

  // Left singular vectors for the significant columns; phase fixed so the
  // first entry above 1e-12 in modulus is real positive.
  Columns q(n, CVector(n, Complex(0.0)));
  for (std::size_t j = 0; j < n; ++j) {
    if (sv[j] <= zero_cut) continue;
    for (std::size_t i = 0; i < n; ++i) q[j][i] = g[j][i] / sv[j];
    Complex ph = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(q[j][i]) > 1e-12) {
        ph = std::conj(q[j][i]) / std::abs(q[j][i]);
        break;
      }
    for (auto& x : q[j]) x *= ph;
    for (auto& x : w[j]) x *= ph;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto snap = [&](double s) { return s <= zero_cut ? 0.0 : s; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double sx = snap(sv[x]), sy = snap(sv[y]);
    if (std::abs(sx - sy) > rank_tol * std::max(smax, 1.0)) return sx > sy;
    if (sx == 0.0 && sy == 0.0) return false;
    return lex_less(q[x], q[y]);
  });

  SvdTriple out;
  out.rank_tol = rank_tol;
  out.sweeps = sweeps;
  out.sigma.resize(n);
  out.sigma_raw.resize(n);
  Columns vcols(n), wcols(n);
  int rank = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma_raw[k] = sv[j];
    double s = snap(sv[j]);
    if (s > 0.0) {
      ++rank;
      if (std::abs(s - 1.0) <= rank_tol) s = 1.0;
    }
    out.sigma[k] = s;
    vcols[k] = q[j];
    wcols[k] = w[j];
  }
  out.rank_s = rank;
  complete_basis(vcols, static_cast<std::size_t>(rank));

  out.V = CMatrix(n);
  out.U = CMatrix(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      out.V(i, k) = vcols[k][i];
      out.U(k, i) = std::conj(wcols[k][i]);  // U = W^*
    }
  return out;
}

double spectral_norm(const CMatrix& a) {
  if (a.dim() == 0) return 0.0;
  return svd(a).sigma.front();
}

bool is_unitary(const CMatrix& a, double tol) {
  const CMatrix p = a * a.adjoint();
  return max_abs_diff(p, CMatrix::identity(a.dim())) <= tol;
}

double head_det_modulus(const SvdTriple& t) {
  if (t.rank_s == 0) throw DomainError("head_det_modulus: rank 0 has no head block");
  double d = 1.0;
  for (int i = 0; i < t.rank_s; ++i) d *= t.sigma[static_cast<std::size_t>(i)];
  return d;
}

}  // namespace fockop
