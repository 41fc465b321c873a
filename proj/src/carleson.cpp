#include "fockop/carleson.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "fockop/errors.hpp"

namespace fockop {

namespace {

using LogIntegrand = std::function<double(std::span<const Complex>)>;

int gh_nodes(std::size_t s, const QuadSpec& spec) {
  const int base = spec.nodes_per_axis > 0 ? spec.nodes_per_axis : 40;
  if (s <= 1) return base;
  return std::min(base, s == 2 ? 20 : 10);
}

// log of int_{C^s} e^{f(z)} dA via z = c + t / sqrt(beta), t on a product
// Gauss-Hermite grid.
double gh_log_integral(const LogIntegrand& f, const CVector& center, const std::vector<double>& beta, int nodes) {
  const std::size_t s = center.size();
  const Rule& rule = gauss_hermite(nodes);
  const std::size_t m = rule.x.size();
  std::vector<std::size_t> idx(2 * s, 0);
  std::vector<double> logs;
  logs.reserve(static_cast<std::size_t>(std::pow(static_cast<double>(m), 2.0 * s)));
  CVector z(s);
  while (true) {
    double lw = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      const double x = rule.x[idx[2 * i]], y = rule.x[idx[2 * i + 1]];
      lw += std::log(rule.w[idx[2 * i]]) + std::log(rule.w[idx[2 * i + 1]]);
      t2 += x * x + y * y;
      z[i] = center[i] + Complex(x, y) / std::sqrt(beta[i]);
    }
    logs.push_back(lw + t2 + f(z));
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == m) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  double out = top + std::log(acc);
  for (double b : beta) out -= std::log(b);
  return out;
}

NormResult gh_lr_norm(const LogIntegrand& log_ell, double r, const CVector& center, const std::vector<double>& beta,
                      int nodes) {
  const auto f = [&](std::span<const Complex> z) { return r * log_ell(z); };
  const double fine = std::exp(gh_log_integral(f, center, beta, nodes) / r);
  const double coarse = std::exp(gh_log_integral(f, center, beta, std::max(4, 3 * nodes / 4)) / r);
  NormResult out;
  out.value = fine;
  out.mode = NormMode::quadrature;
  out.err_estimate = 2.0 * std::abs(fine - coarse) + 64.0 * std::numeric_limits<double>::epsilon() * fine;
  return out;
}

void check_pq(double p, double q) {
  if (!(q > 0.0) || !(p > q) || !std::isfinite(p))
    throw DomainError("carleson_integral requires 0 < q < p < inf (got p = " + std::to_string(p) +
                      ", q = " + std::to_string(q) + ")");
}

bool contracting(const EllProfile& prof) {
  return std::all_of(prof.coords.begin(), prof.coords.end(), [](const CoordinateData& c) { return c.a < 1.0; });
}

NormResult definition_lr(const EllProfile& certified, double r) {
  if (!contracting(certified)) throw DomainError("lr_quadrature: l is not in L^r when some a_i = 1");
  EllProfile prof = certified;
  prof.mode = ProfileMode::numeric;
  const EllSup sup = ell_sup(prof);
  if (!sup.finite) throw NumericalError("lr_quadrature: sup search reported growth (" + sup.reason + ")");
  std::vector<double> beta;
  for (const auto& c : prof.coords) beta.push_back(0.25 * r * (1.0 - c.a * c.a));
  const auto log_ell = [&](std::span<const Complex> z) { return log_ell_at(prof, z); };
  return gh_lr_norm(log_ell, r, sup.argmax, beta, gh_nodes(beta.size(), prof.quad));
}

CVector mean_frequency(const ExpPoly& f, double* spread) {
  const std::size_t n = f.dim();
  CVector c(n, Complex(0.0));
  double total = 0.0;
  for (const auto& t : f.terms()) {
    const double w = std::abs(t.coeff) * std::exp(0.5 * norm_sq(t.freq));
    total += w;
    for (std::size_t i = 0; i < n; ++i) c[i] += w * t.freq[i];
  }
  if (total > 0.0)
    for (auto& x : c) x /= total;
  double sp = 0.0;
  for (const auto& t : f.terms()) {
    CVector d = t.freq;
    for (std::size_t i = 0; i < n; ++i) d[i] -= c[i];
    sp = std::max(sp, norm(d));
  }
  if (spread) *spread = sp;
  return c;
}

// Nested composite Gauss-Legendre over {x in box : |x - c| < radius} in R^d.
double ball_box_integral(const std::vector<double>& c, double radius, const std::vector<double>& lo,
                         const std::vector<double>& hi, const std::function<double(const std::vector<double>&)>& f,
                         int panels, int gl) {
  const Rule& rule = gauss_legendre(gl);
  const std::size_t d = c.size();
  std::vector<double> x(d);
  std::function<double(std::size_t, double)> level = [&](std::size_t k, double rem) -> double {
    if (k == d) return f(x);
    const double half = std::sqrt(std::max(rem, 0.0));
    const double a = std::max(lo[k], c[k] - half), b = std::min(hi[k], c[k] + half);
    if (!(b > a)) return 0.0;
    // x = c + half sin(t) removes the square-root behaviour at the sphere.
    const bool round = std::isfinite(half);
    const double ta = round ? std::asin(std::clamp((a - c[k]) / half, -1.0, 1.0)) : a;
    const double tb = round ? std::asin(std::clamp((b - c[k]) / half, -1.0, 1.0)) : b;
    const double h = (tb - ta) / panels;
    double acc = 0.0;
    for (int j = 0; j < panels; ++j) {
      const double mid = ta + (j + 0.5) * h;
      for (std::size_t g = 0; g < rule.x.size(); ++g) {
        const double t = mid + 0.5 * h * rule.x[g];
        const double jac = round ? half * std::cos(t) : 1.0;
        x[k] = round ? c[k] + half * std::sin(t) : t;
        const double dx = x[k] - c[k];
        acc += 0.5 * h * rule.w[g] * jac * level(k + 1, rem - dx * dx);
      }
    }
    return acc;
  };
  return level(0, radius * radius);
}

int box_panels(std::size_t s) { return s <= 1 ? 6 : 2; }
int box_nodes(std::size_t s) { return s <= 1 ? 16 : 8; }

double support_halfwidth(const ExpPoly& f, double q, double spread) {
  return (9.0 + 2.0 * std::sqrt(static_cast<double>(f.max_degree())) + spread) / std::sqrt(q);
}

}  // namespace

std::string to_string(CarlesonMode m) { return m == CarlesonMode::closed_form ? "closed_form" : "quadrature"; }

CarlesonReport carleson_integral(const Normalization& norm, double p, double q, const QuadSpec& spec) {
  check_pq(p, q);
  const EllProfile prof = ell_profile(norm, q, spec);
  CarlesonReport rep;
  const double r = p * q / (p - q);
  rep.r_exponent = r;

  if (prof.mode == ProfileMode::numeric) {
    rep.mode = CarlesonMode::quadrature;
    if (!ray_verdict(prof).decays) return rep;
    rep.lr_norm = definition_lr(prof, r);
    rep.member = true;
    return rep;
  }
  if (!contracting(prof)) {
    rep.mode = CarlesonMode::closed_form;
    return rep;
  }
  rep.member = true;
  if (prof.pure_exponential) {
    double log_int = r * std::log(prof.constant_factor);
    for (const auto& c : prof.coords) {
      const double alpha = 0.5 * (1.0 - c.a * c.a);
      log_int += std::log(std::numbers::pi / (r * alpha)) + r * std::norm(c.w) / (4.0 * alpha);
    }
    NormResult v;
    v.value = std::exp(log_int / r);
    v.mode = NormMode::closed_form;
    v.err_estimate = 64.0 * std::numeric_limits<double>::epsilon() * v.value;
    rep.lr_norm = v;
    rep.mode = CarlesonMode::closed_form;
    return rep;
  }
  CVector mu;
  std::vector<double> beta;
  for (const auto& c : prof.coords) {
    mu.push_back(c.w / (1.0 - c.a * c.a));
    beta.push_back(0.5 * r * (1.0 - c.a * c.a));
  }
  const auto log_ell = [&](std::span<const Complex> z) { return log_ell_at(prof, z); };
  rep.lr_norm = gh_lr_norm(log_ell, r, mu, beta, gh_nodes(mu.size(), prof.quad));
  rep.mode = CarlesonMode::quadrature;
  return rep;
}

NormResult lr_quadrature(const Normalization& norm, double p, double q, const QuadSpec& spec) {
  check_pq(p, q);
  return definition_lr(ell_profile(norm, q, spec), p * q / (p - q));
}

double pullback_mass(const Normalization& norm, double q, std::span<const Complex> center, double radius,
                     const QuadSpec& spec) {
  if (norm.rank_s == 0) throw DomainError("pullback_mass: rank 0 has no effective domain");
  const std::size_t s = static_cast<std::size_t>(norm.rank_s);
  if (center.size() != s) throw DimensionError("pullback_mass: center must lie in C^" + std::to_string(s));
  if (!(radius > 0.0)) throw DomainError("pullback_mass: radius must be positive");
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("pullback_mass: q must lie in (0, inf)");

  double spread = 0.0;
  const CVector cbar = mean_frequency(norm.psi_t, &spread);
  const double h = support_halfwidth(norm.psi_t, q, spread);
  std::vector<double> c(2 * s), lo(2 * s), hi(2 * s);
  double jac = 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double a = norm.A_t[i];
    const Complex mid = a * cbar[i] + norm.b_t[i];
    c[2 * i] = center[i].real();
    c[2 * i + 1] = center[i].imag();
    lo[2 * i] = mid.real() - a * h;
    hi[2 * i] = mid.real() + a * h;
    lo[2 * i + 1] = mid.imag() - a * h;
    hi[2 * i + 1] = mid.imag() + a * h;
    jac /= a * a;
  }
  const QuadSpec rs = spec.resolved(norm.dim() - s);
  const double scale = std::pow(q / (2.0 * std::numbers::pi), static_cast<double>(s)) * jac;
  CVector z(s);
  const auto f = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < s; ++i)
      z[i] = (Complex(x[2 * i], x[2 * i + 1]) - norm.b_t[i]) / norm.A_t[i];
    const double v = slice_norm(norm.psi_t, q, z, rs).value;
    return std::pow(v, q) * std::exp(-0.5 * q * norm_sq(z));
  };
  return scale * ball_box_integral(c, radius, lo, hi, f, box_panels(s), box_nodes(s));
}

NormResult berezin_transform(const Normalization& norm, double q, std::span<const Complex> w_head,
                             const QuadSpec& spec) {
  if (norm.rank_s == 0) throw DomainError("berezin_transform: rank 0 has no effective domain");
  const std::size_t s = static_cast<std::size_t>(norm.rank_s), n = norm.dim();
  if (w_head.size() != s) throw DimensionError("berezin_transform: w must lie in C^" + std::to_string(s));
  CVector v(n, Complex(0.0));
  Complex shift = 0.0;
  double w2 = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    v[i] = norm.A_t[i] * w_head[i];
    shift += norm.b_t[i] * std::conj(w_head[i]);
    w2 += std::norm(w_head[i]);
  }
  const ExpPoly g = multiply(norm.psi_t, kernel(v)).scaled(std::exp(shift - 0.5 * w2));
  const NormResult r = fock_norm(g, q, spec);
  NormResult out = r;
  out.value = std::pow(r.value, q);
  out.err_estimate = r.value > 0.0 ? q * out.value / r.value * r.err_estimate : 0.0;
  return out;
}

NormResult berezin_measure_integral(const Normalization& norm, double q, std::span<const Complex> w_head,
                                    const QuadSpec&) {
  const std::size_t n = norm.dim(), s = static_cast<std::size_t>(norm.rank_s);
  if (s != n) throw DomainError("berezin_measure_integral: requires full rank");
  if (w_head.size() != s) throw DimensionError("berezin_measure_integral: w must lie in C^" + std::to_string(s));
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("berezin_measure_integral: q must lie in (0, inf)");
  double spread = 0.0;
  const CVector cbar = mean_frequency(norm.psi_t, &spread);
  const double h = support_halfwidth(norm.psi_t, q, spread);
  const ExpPoly kw = normalized_kernel(CVector(w_head.begin(), w_head.end()));
  const AffineMap phi = norm.phi_t();
  std::vector<double> c(2 * n), lo(2 * n), hi(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex mid = cbar[i] + norm.A_t[i] * w_head[i];
    c[2 * i] = mid.real();
    c[2 * i + 1] = mid.imag();
    lo[2 * i] = mid.real() - h;
    hi[2 * i] = mid.real() + h;
    lo[2 * i + 1] = mid.imag() - h;
    hi[2 * i + 1] = mid.imag() + h;
  }
  const double scale = std::pow(q / (2.0 * std::numbers::pi), static_cast<double>(n));
  CVector z(n);
  const auto f = [&](const std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
    const double v = std::abs(norm.psi_t(z) * kw(phi(z)));
    return std::pow(v, q) * std::exp(-0.5 * q * norm_sq(z));
  };
  const double inf = std::numeric_limits<double>::infinity();
  const int panels = box_panels(n), nodes = box_nodes(n);
  const double fine = scale * ball_box_integral(c, inf, lo, hi, f, panels, nodes);
  const double coarse = scale * ball_box_integral(c, inf, lo, hi, f, panels, 3 * nodes / 4);
  NormResult out;
  out.value = fine;
  out.mode = NormMode::quadrature;
  out.err_estimate = 2.0 * std::abs(fine - coarse) + 64.0 * std::numeric_limits<double>::epsilon() * fine;
  return out;
}

}  // namespace fockop
