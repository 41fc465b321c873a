#include "fockop/quad.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_qrng.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

#include "fockop/errors.hpp"

namespace fockop {

int default_nodes(std::size_t n) { return n <= 2 ? 40 : 24; }

int default_sup_grid(std::size_t n) {
  if (n <= 1) return 81;
  if (n == 2) return 15;
  return 20000;
}

QuadSpec QuadSpec::resolved(std::size_t n) const {
  QuadSpec r = *this;
  if (r.nodes_per_axis <= 0) r.nodes_per_axis = default_nodes(n);
  if (r.sup_grid <= 0) r.sup_grid = default_sup_grid(n);
  return r;
}

std::string to_string(QuadMethod m) {
  return m == QuadMethod::gauss_hermite ? "gauss_hermite" : "monte_carlo";
}

std::string to_string(NormMode m) {
  switch (m) {
    case NormMode::closed_form: return "closed_form";
    case NormMode::quadrature: return "quadrature";
    case NormMode::monte_carlo: return "monte_carlo";
    case NormMode::sup_search: return "sup_search";
  }
  return "unknown";
}

namespace {

void silence_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

Rule build_rule(const gsl_integration_fixed_type* type, int nodes, double a, double b) {
  silence_gsl();
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(type, static_cast<std::size_t>(nodes), a, b, 0.0, 0.0),
      gsl_integration_fixed_free);
  if (!ws) throw NumericalError("could not build a " + std::to_string(nodes) + "-point rule");
  const double* x = gsl_integration_fixed_nodes(ws.get());
  const double* w = gsl_integration_fixed_weights(ws.get());
  Rule r;
  r.x.assign(x, x + nodes);
  r.w.assign(w, w + nodes);
  return r;
}

const Rule& cached_rule(int kind, int nodes) {
  if (nodes < 1) throw DomainError("quadrature rule needs at least one node");
  static std::mutex mu;
  static std::map<std::pair<int, int>, Rule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find({kind, nodes});
  if (it == cache.end()) {
    Rule r = kind == 0 ? build_rule(gsl_integration_fixed_hermite, nodes, 0.0, 1.0)
                       : build_rule(gsl_integration_fixed_legendre, nodes, -1.0, 1.0);
    it = cache.emplace(std::make_pair(kind, nodes), std::move(r)).first;
  }
  return it->second;
}

void check_exponent(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw DomainError("exponent p must lie in (0, inf), got " + std::to_string(p));
}

// f = e^{<z, center>} g with the term frequencies of g shifted by -center.
struct Centered {
  CVector center;
  std::vector<Term> terms;
};

Centered center_terms(const ExpPoly& f) {
  const std::size_t n = f.dim();
  Centered c{CVector(n, Complex(0.0)), f.terms()};
  double total = 0.0;
  std::vector<double> wt;
  for (const auto& t : f.terms()) wt.push_back(std::log(std::abs(t.coeff)) + 0.5 * norm_sq(t.freq));
  const double top = *std::max_element(wt.begin(), wt.end());
  for (std::size_t j = 0; j < wt.size(); ++j) {
    const double w = std::exp(wt[j] - top);
    total += w;
    for (std::size_t i = 0; i < n; ++i) c.center[i] += w * f.terms()[j].freq[i];
  }
  for (auto& x : c.center) x /= total;
  if (f.common_frequency()) c.center = f.terms().front().freq;
  for (auto& t : c.terms)
    for (std::size_t i = 0; i < n; ++i) t.freq[i] -= c.center[i];
  return c;
}

// Per-coordinate complex nodes zeta = sqrt(2/p)(x_a + i x_b) with weights w_a w_b / pi.
struct Grid2 {
  std::vector<Complex> z;
  std::vector<double> w;
};

Grid2 complex_nodes(int nodes, double p) {
  const Rule& r = gauss_hermite(nodes);
  const double s = std::sqrt(2.0 / p);
  Grid2 g;
  for (int a = 0; a < nodes; ++a)
    for (int b = 0; b < nodes; ++b) {
      g.z.emplace_back(s * r.x[a], s * r.x[b]);
      g.w.push_back(r.w[a] * r.w[b] / std::numbers::pi);
    }
  return g;
}

// table[j][k] = (center + zeta_k)^alpha e^{(center + zeta_k) conj(d)} for term j, one coordinate.
std::vector<std::vector<Complex>> coordinate_table(const std::vector<Term>& terms, std::size_t i,
                                                   Complex center, const Grid2& g) {
  std::vector<std::vector<Complex>> t(terms.size(), std::vector<Complex>(g.z.size()));
  for (std::size_t j = 0; j < terms.size(); ++j)
    for (std::size_t k = 0; k < g.z.size(); ++k) {
      const Complex z = center + g.z[k];
      Complex v = std::exp(z * std::conj(terms[j].freq[i]));
      for (int e = 0; e < terms[j].power[i]; ++e) v *= z;
      t[j][k] = v;
    }
  return t;
}

// pi^{-n} sum W |g|^{2k} through |g^k|^2 = sum_{j,l} h_j conj(h_l) prod_i I_i(j,l).
double separable_even_sum(const std::vector<Term>& terms, const CVector& center, double p,
                          const std::vector<int>& nodes) {
  const std::size_t n = center.size();
  const int k = static_cast<int>(std::lround(p / 2.0));
  ExpPoly g(n, terms);
  ExpPoly h = g;
  for (int e = 1; e < k; ++e) h = multiply(h, g);
  const auto& ht = h.terms();
  const std::size_t m = ht.size();
  std::vector<Complex> pair(m * m, Complex(1.0));
  for (std::size_t i = 0; i < n; ++i) {
    const Grid2 grid = complex_nodes(nodes[i], p);
    const auto tab = coordinate_table(ht, i, center[i], grid);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = j; l < m; ++l) {
        Complex s = 0.0;
        for (std::size_t q = 0; q < grid.z.size(); ++q) s += grid.w[q] * tab[j][q] * std::conj(tab[l][q]);
        pair[j * m + l] *= s;
      }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    total += std::norm(ht[j].coeff) * pair[j * m + j].real();
    for (std::size_t l = j + 1; l < m; ++l)
      total += 2.0 * (ht[j].coeff * std::conj(ht[l].coeff) * pair[j * m + l]).real();
  }
  return std::max(total, 0.0);
}

// pi^{-n} sum W |g|^p over the full product grid.
double full_grid_sum(const std::vector<Term>& terms, const CVector& center, double p, int nodes) {
  const std::size_t n = center.size();
  const std::size_t nt = terms.size();
  const Grid2 grid = complex_nodes(nodes, p);
  std::vector<std::vector<std::vector<Complex>>> tab(n);
  for (std::size_t i = 0; i < n; ++i) tab[i] = coordinate_table(terms, i, center[i], grid);
  std::vector<std::vector<Complex>> partial(n + 1, std::vector<Complex>(nt));
  for (std::size_t j = 0; j < nt; ++j) partial[0][j] = terms[j].coeff;
  const double half_p = p / 2.0;
  const std::size_t npts = grid.z.size();
  double total = 0.0;

  std::vector<std::size_t> idx(n, 0);
  std::vector<double> wacc(n + 1, 1.0);
  std::size_t level = 0;
  // Odometer over n coordinates, refreshing partial products from the changed level down.
  for (;;) {
    for (; level < n; ++level) {
      const std::size_t k = idx[level];
      for (std::size_t j = 0; j < nt; ++j) partial[level + 1][j] = partial[level][j] * tab[level][j][k];
      wacc[level + 1] = wacc[level] * grid.w[k];
    }
    Complex g = 0.0;
    for (std::size_t j = 0; j < nt; ++j) g += partial[n][j];
    const double a = std::norm(g);
    if (a > 0.0) total += wacc[n] * std::pow(a, half_p);
    std::size_t d = n;
    while (d > 0) {
      --d;
      if (++idx[d] < npts) break;
      idx[d] = 0;
      if (d == 0) return total;
    }
    level = d;
  }
}

bool is_even_integer(double p) {
  const double k = std::round(p / 2.0);
  return k >= 1.0 && std::abs(p - 2.0 * k) < 1e-12;
}

double monte_carlo_sum(const std::vector<Term>& terms, const CVector& center, double p,
                       std::uint64_t samples, std::uint64_t seed, double& std_err) {
  const std::size_t n = center.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(p));
  const ExpPoly g(n, terms);
  CVector z(n);
  double mean = 0.0, m2 = 0.0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = normal(rng);
      const double y = normal(rng);
      z[i] = center[i] + Complex(x, y);
    }
    const double v = std::pow(std::norm(g(z)), p / 2.0);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
  std_err = std::sqrt(var / static_cast<double>(samples));
  return mean;
}

std::optional<NormResult> closed_form_norm(const ExpPoly& f, double p) {
  if (f.terms().size() != 1) return std::nullopt;
  const Term& t = f.terms().front();
  if (total_degree(t.power) == 0)
    return NormResult{std::abs(t.coeff) * std::exp(0.5 * norm_sq(t.freq)), NormMode::closed_form};
  if (norm_sq(t.freq) == 0.0) {
    double log_v = std::log(std::abs(t.coeff));
    for (int a : t.power) {
      const double h = 0.5 * p * a;
      log_v += (h * std::log(2.0 / p) + std::lgamma(h + 1.0)) / p;
    }
    return NormResult{std::exp(log_v), NormMode::closed_form};
  }
  return std::nullopt;
}

// Twice the largest deviation from the coarser rules with N/2 .. 7N/8 nodes.
template <class F>
double coarse_spread(double v, int full, F&& at) {
  double d = 0.0;
  for (int eighths = 4; eighths <= 7; ++eighths) {
    const int m = std::max(2, (eighths * full) / 8);
    if (m < full) d = std::max(d, std::abs(v - at(m)));
  }
  return 2.0 * d;
}

}  // namespace

const Rule& gauss_hermite(int nodes) { return cached_rule(0, nodes); }
const Rule& gauss_legendre(int nodes) { return cached_rule(1, nodes); }

NormResult fock_norm(const ExpPoly& f, double p, const QuadSpec& spec_in) {
  check_exponent(p);
  if (f.is_zero()) return NormResult{0.0, NormMode::closed_form};
  const std::size_t n = f.dim();
  const QuadSpec spec = spec_in.resolved(n);
  if (spec.allow_closed_form)
    if (auto r = closed_form_norm(f, p)) return *r;
  if (n == 0) return NormResult{std::abs(f.terms().front().coeff), NormMode::closed_form};

  const Centered c = center_terms(f);
  const double log_scale = 0.5 * norm_sq(c.center);
  const auto finish = [&](double sum) { return std::exp(log_scale + std::log(sum) / p); };

  if (spec.method == QuadMethod::monte_carlo) {
    double se = 0.0;
    const double mean = monte_carlo_sum(c.terms, c.center, p, spec.samples, spec.seed, se);
    if (!(mean > 0.0)) return NormResult{0.0, NormMode::monte_carlo, 0.0};
    const double v = finish(mean);
    return NormResult{v, NormMode::monte_carlo, 3.0 * v * se / (p * mean)};
  }

  if (spec.nodes_per_axis < 1) throw DomainError("nodes_per_axis must be positive");
  const int full = spec.nodes_per_axis;

  if (is_even_integer(p)) {
    const int k = static_cast<int>(std::lround(p / 2.0));
    if (f.common_frequency()) {
      // Polynomial times the centered Gaussian: the product rule with
      // k*deg_i + 1 nodes per real axis is exact.
      std::vector<int> nodes(n, 1);
      for (const auto& t : c.terms)
        for (std::size_t i = 0; i < n; ++i) nodes[i] = std::max(nodes[i], k * t.power[i] + 1);
      const double v = finish(separable_even_sum(c.terms, c.center, p, nodes));
      return NormResult{v, NormMode::quadrature, 64.0 * std::numeric_limits<double>::epsilon() * v};
    }
    const auto at = [&](int m) {
      return finish(separable_even_sum(c.terms, c.center, p, std::vector<int>(n, m)));
    };
    const double v = at(full);
    return NormResult{v, NormMode::quadrature, coarse_spread(v, full, at)};
  }

  // |g|^p is not smooth where g vanishes, so convergence is only algebraic
  // and not monotone.
  const auto at = [&](int m) {
    const double s = full_grid_sum(c.terms, c.center, p, m);
    return s > 0.0 ? finish(s) : 0.0;
  };
  const double v = at(full);
  return NormResult{v, NormMode::quadrature, coarse_spread(v, full, at)};
}

namespace {

double tail_bound(double log_mass, int deg, double cmax, double r) {
  return log_mass + deg * std::log1p(r) + cmax * r - 0.5 * r * r;
}

struct TailData {
  double log_mass = 0.0;
  double log_maxcoeff = 0.0;
  double cmax = 0.0;
  int deg = 0;
};

TailData tail_data(const ExpPoly& f) {
  TailData d;
  double mass = 0.0, top = 0.0;
  for (const auto& t : f.terms()) {
    mass += std::abs(t.coeff);
    top = std::max(top, std::abs(t.coeff));
    d.cmax = std::max(d.cmax, norm(t.freq));
    d.deg = std::max(d.deg, total_degree(t.power));
  }
  d.log_mass = std::log(mass);
  d.log_maxcoeff = std::log(top);
  return d;
}

double default_sup_radius(const ExpPoly& f) {
  const TailData d = tail_data(f);
  const double l = std::log(static_cast<double>(f.terms().size())) + d.log_maxcoeff;
  double r = d.cmax + 1.0;
  for (int it = 0; it < 2; ++it) r = d.cmax + std::sqrt(std::max(0.0, 2.0 * l + 4.0 * d.deg * std::log1p(r)));
  return std::max(r, 1.0);
}

struct NmContext {
  const std::function<double(std::span<const Complex>)>* objective;
  std::size_t dim;
  CVector z;
};

double nm_cost(const gsl_vector* x, void* params) {
  auto* ctx = static_cast<NmContext*>(params);
  for (std::size_t i = 0; i < ctx->dim; ++i)
    ctx->z[i] = Complex(gsl_vector_get(x, 2 * i), gsl_vector_get(x, 2 * i + 1));
  const double v = (*ctx->objective)(ctx->z);
  return std::isfinite(v) ? -v : 1e300;
}

std::pair<double, CVector> nelder_mead(const std::function<double(std::span<const Complex>)>& objective,
                                       std::size_t dim, const CVector& start, double step, int iters) {
  silence_gsl();
  NmContext ctx{&objective, dim, CVector(dim)};
  gsl_multimin_function fn{&nm_cost, 2 * dim, &ctx};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2 * dim), gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> ss(gsl_vector_alloc(2 * dim), gsl_vector_free);
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x.get(), 2 * i, start[i].real());
    gsl_vector_set(x.get(), 2 * i + 1, start[i].imag());
  }
  gsl_vector_set_all(ss.get(), step);
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2 * dim),
      gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), ss.get());
  for (int it = 0; it < iters; ++it) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), 1e-10) == GSL_SUCCESS) break;
  }
  CVector best(dim);
  const gsl_vector* bx = gsl_multimin_fminimizer_x(s.get());
  for (std::size_t i = 0; i < dim; ++i)
    best[i] = Complex(gsl_vector_get(bx, 2 * i), gsl_vector_get(bx, 2 * i + 1));
  return {objective(best), best};
}

}  // namespace

double tail_radius(const ExpPoly& f, double log_level) {
  if (f.is_zero()) return 0.0;
  const TailData d = tail_data(f);
  // The bound is concave in r; start from its peak and bisect downhill.
  double lo = 0.0, hi = d.cmax + d.deg + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d.deg / (1.0 + mid) + d.cmax - mid > 0.0) lo = mid; else hi = mid;
  }
  const double peak = lo;
  if (tail_bound(d.log_mass, d.deg, d.cmax, peak) < log_level) return 0.0;
  lo = peak;
  hi = peak + 1.0;
  while (tail_bound(d.log_mass, d.deg, d.cmax, hi) >= log_level) hi = peak + 2.0 * (hi - peak);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail_bound(d.log_mass, d.deg, d.cmax, mid) >= log_level) lo = mid; else hi = mid;
  }
  return hi;
}

SupSearch maximize_log(const std::function<double(std::span<const Complex>)>& objective,
                       std::size_t dim, double radius, int grid, int refine_iters,
                       const std::vector<CVector>& seeds) {
  if (dim == 0) return SupSearch{objective(CVector{}), CVector{}};
  if (!(radius > 0.0)) throw DomainError("sup search radius must be positive");
  std::vector<std::pair<double, CVector>> samples;
  CVector z(dim);
  const auto record = [&](const CVector& pt) {
    const double v = objective(pt);
    samples.emplace_back(std::isfinite(v) ? v : -std::numeric_limits<double>::infinity(), pt);
  };

  double step = 0.0;
  if (dim <= 2) {
    const int g = std::max(grid, 2);
    step = 2.0 * radius / (g - 1);
    const std::size_t axes = 2 * dim;
    std::vector<int> idx(axes, 0);
    for (;;) {
      for (std::size_t i = 0; i < dim; ++i)
        z[i] = Complex(-radius + step * idx[2 * i], -radius + step * idx[2 * i + 1]);
      record(z);
      std::size_t a = 0;
      while (a < axes && ++idx[a] == g) idx[a++] = 0;
      if (a == axes) break;
    }
  } else {
    std::unique_ptr<gsl_qrng, decltype(&gsl_qrng_free)> q(
        gsl_qrng_alloc(gsl_qrng_halton, static_cast<unsigned>(2 * dim)), gsl_qrng_free);
    std::vector<double> u(2 * dim);
    for (int k = 0; k < grid; ++k) {
      gsl_qrng_get(q.get(), u.data());
      for (std::size_t i = 0; i < dim; ++i)
        z[i] = Complex(radius * (2.0 * u[2 * i] - 1.0), radius * (2.0 * u[2 * i + 1] - 1.0));
      record(z);
    }
    step = 2.0 * radius / std::pow(static_cast<double>(grid), 1.0 / (2.0 * dim));
  }

  constexpr std::size_t kStarts = 6;
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<CVector> starts;
  for (std::size_t k = 0; k < std::min(kStarts, samples.size()); ++k) starts.push_back(samples[k].second);
  for (const auto& s : seeds) {
    if (s.size() != dim) throw DimensionError("sup search seed has wrong dimension");
    starts.push_back(s);
  }

  SupSearch best{samples.front().first, samples.front().second};
  for (const auto& s : starts) {
    const double v0 = objective(s);
    if (std::isfinite(v0) && v0 > best.log_value) best = SupSearch{v0, s};
    if (refine_iters <= 0) continue;
    auto [v, x] = nelder_mead(objective, dim, s, std::max(step, 1e-3), refine_iters);
    if (std::isfinite(v) && v > best.log_value) best = SupSearch{v, x};
  }
  return best;
}

NormResult fock_sup_norm(const ExpPoly& f, const QuadSpec& spec_in) {
  if (f.is_zero()) return NormResult{0.0, NormMode::closed_form};
  const std::size_t n = f.dim();
  const QuadSpec spec = spec_in.resolved(n);
  if (spec.allow_closed_form && f.terms().size() == 1) {
    const Term& t = f.terms().front();
    if (total_degree(t.power) == 0) {
      NormResult r{std::abs(t.coeff) * std::exp(0.5 * norm_sq(t.freq)), NormMode::closed_form};
      r.argmax = t.freq;
      return r;
    }
    if (norm_sq(t.freq) == 0.0) {
      double log_v = std::log(std::abs(t.coeff));
      CVector at(n);
      for (std::size_t i = 0; i < n; ++i) {
        const int a = t.power[i];
        if (a > 0) log_v += 0.5 * a * (std::log(static_cast<double>(a)) - 1.0);
        at[i] = std::sqrt(static_cast<double>(a));
      }
      NormResult r{std::exp(log_v), NormMode::closed_form};
      r.argmax = at;
      return r;
    }
  }

  const std::function<double(std::span<const Complex>)> objective = [&f](std::span<const Complex> z) {
    return std::log(std::abs(f(z))) - 0.5 * norm_sq(z);
  };
  std::vector<CVector> seeds{CVector(n, Complex(0.0))};
  for (const auto& t : f.terms()) {
    seeds.push_back(t.freq);
    for (std::size_t i = 0; i < n; ++i)
      if (t.power[i] > 0) {
        CVector s = t.freq;
        s[i] += std::sqrt(static_cast<double>(t.power[i]));
        seeds.push_back(std::move(s));
      }
  }
  double radius = spec.sup_radius > 0.0 ? spec.sup_radius : default_sup_radius(f);
  SupSearch best = maximize_log(objective, n, radius, spec.sup_grid, spec.refine_iters, seeds);
  double tail = tail_radius(f, best.log_value);
  if (tail > radius) {
    radius = tail;
    SupSearch again = maximize_log(objective, n, radius, spec.sup_grid, spec.refine_iters, seeds);
    if (again.log_value > best.log_value) best = again;
    tail = tail_radius(f, best.log_value);
  }
  NormResult r{std::exp(best.log_value), NormMode::sup_search, 0.0};
  r.search_radius = std::max(tail, 0.0);
  r.argmax = best.argmax;
  return r;
}

NormResult slice_norm(const ExpPoly& psi, double q, std::span<const Complex> head, const QuadSpec& spec) {
  check_exponent(q);
  const std::size_t n = psi.dim();
  if (head.empty() || head.size() > n)
    throw DomainError("slice_norm: head length " + std::to_string(head.size()) + " must lie in (0, " +
                      std::to_string(n) + "]");
  if (head.size() == n) return NormResult{std::abs(psi(head)), NormMode::closed_form};
  return fock_norm(slice_head(psi, head), q, spec);
}

}  // namespace fockop
