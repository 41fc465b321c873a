#include "fockop/wco.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "fockop/carleson.hpp"
#include "fockop/errors.hpp"

namespace fockop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  std::ostringstream o;
  o << std::setprecision(6) << x;
  return o.str();
}

std::string num(Complex z) {
  if (z.imag() == 0.0) return num(z.real());
  return "(" + num(z.real()) + ", " + num(z.imag()) + ")";
}

void check_exponent(const char* name, double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw DomainError(std::string(name) + " must lie in (0, inf), got " + std::to_string(p));
}

double head_det(const Normalization& norm) {
  double d = 1.0;
  for (int i = 0; i < norm.rank_s; ++i) d *= norm.A_t[static_cast<std::size_t>(i)];
  return d;
}

double tail_b_sq(const Normalization& norm) {
  double s = 0.0;
  for (std::size_t i = static_cast<std::size_t>(norm.rank_s); i < norm.dim(); ++i) s += std::norm(norm.b_t[i]);
  return s;
}

double w_tolerance(const EllProfile& p) {
  double scale = 1.0 + norm(p.b_t);
  for (const auto& t : p.psi_t.terms()) scale = std::max(scale, 1.0 + norm(t.freq));
  return 1e-9 * scale;
}

bool flat(const EllProfile& p, const CoordinateData& c) {
  return c.a == 1.0 && std::abs(c.w) <= w_tolerance(p) && c.deg == 0;
}

bool all_contracting(const EllProfile& p) {
  return std::all_of(p.coords.begin(), p.coords.end(), [](const CoordinateData& c) { return c.a < 1.0; });
}

std::string describe_coords(const EllProfile& p) {
  std::string out;
  for (std::size_t i = 0; i < p.coords.size(); ++i) {
    const auto& c = p.coords[i];
    out += " [i=" + std::to_string(i) + " a=" + num(c.a) + " w=" + num(c.w) + " deg=" + std::to_string(c.deg);
    if (c.a < 1.0) out += " gaussian decay]";
    else if (flat(p, c)) out += " flat]";
    else out += c.deg > 0 ? " polynomial growth]" : " exponential growth]";
  }
  return out;
}

EllProfile build_profile(const Normalization& norm, double q, std::size_t s, const QuadSpec& spec) {
  EllProfile p;
  p.s = static_cast<int>(s);
  p.n = norm.dim();
  p.q = q;
  p.psi_t = norm.psi_t;
  p.a = norm.A_t;
  p.b_t = norm.b_t;
  p.quad = spec.resolved(p.n);

  const auto freq = norm.psi_t.common_frequency();
  if (!freq) {
    p.mode = ProfileMode::numeric;
    for (std::size_t i = 0; i < s; ++i) p.coords.push_back(CoordinateData{norm.A_t[i], 0.0, 0});
    return p;
  }
  p.mode = ProfileMode::certified_single_freq;
  const CVector& c = *freq;
  std::vector<Term> res = norm.psi_t.terms();
  for (auto& t : res)
    for (std::size_t i = 0; i < s; ++i) t.freq[i] = 0.0;
  p.residual = ExpPoly(p.n, std::move(res));
  for (std::size_t i = 0; i < s; ++i) {
    int deg = 0;
    for (const auto& t : norm.psi_t.terms()) deg = std::max(deg, t.power[i]);
    p.coords.push_back(CoordinateData{norm.A_t[i], c[i] + norm.A_t[i] * norm.b_t[i], deg});
  }
  p.pure_exponential = norm.psi_t.max_degree() == 0;
  double tail_c = 0.0;
  for (std::size_t i = s; i < p.n; ++i) tail_c += std::norm(c[i]);
  const double b2 = norm_sq(norm.b_t);
  if (p.pure_exponential) {
    p.constant_factor = std::abs(norm.psi_t.terms().front().coeff) * std::exp(0.5 * (tail_c + b2));
  } else {
    p.constant_factor = std::exp(0.5 * b2);
  }
  return p;
}

double log_q_factor(const EllProfile& p, std::span<const Complex> z_head) {
  if (p.pure_exponential) return 0.0;
  if (static_cast<std::size_t>(p.s) == p.n) return std::log(std::abs(p.residual(z_head)));
  return std::log(fock_norm(slice_head(p.residual, z_head), p.q, p.quad).value);
}

int sup_grid_for(std::size_t d) {
  if (d <= 1) return 41;
  if (d == 2) return 9;
  return 2000;
}

}  // namespace

void WcoProblem::validate() const {
  if (phi.A.dim() != phi.b.size()) throw DimensionError("phi: matrix and shift dimensions differ");
  if (dim() == 0) throw DimensionError("problem dimension must be at least 1");
  if (psi.dim() != dim())
    throw DimensionError("psi lives on C^" + std::to_string(psi.dim()) + " but phi on C^" + std::to_string(dim()));
  if (psi.is_zero()) throw DomainError("psi must be nonzero");
  check_exponent("p", p);
  check_exponent("q", q);
}

Admissibility admissibility(const WcoProblem& problem, double tol) {
  return spectral_norm(problem.phi.A) > 1.0 + tol ? Admissibility::inadmissible_norm_gt_1 : Admissibility::admissible;
}

AffineMap Normalization::phi_t() const {
  return AffineMap(CMatrix::diagonal(std::span<const double>(A_t)), b_t);
}

Normalization normalize_with(const ExpPoly& psi, const AffineMap& phi, const SvdTriple& t) {
  const std::size_t n = phi.dim();
  if (psi.dim() != n || t.V.dim() != n || t.U.dim() != n || t.sigma.size() != n)
    throw DimensionError("normalize: dimension mismatch");
  if (!is_unitary(t.V, 1e-9) || !is_unitary(t.U, 1e-9)) throw DomainError("normalize: factors are not unitary");
  const double tie = kDefaultRankTol * std::max(1.0, t.sigma.front());
  for (std::size_t i = 1; i < n; ++i)
    if (t.sigma[i] > t.sigma[i - 1] + tie) throw DomainError("normalize: sigma must be non-increasing");
  if (max_abs_diff(t.reconstruct(), phi.A) > 1e-9) throw DomainError("normalize: factors do not reproduce A");
  Normalization out;
  out.psi_t = compose_affine(psi, AffineMap(t.U.adjoint(), CVector(n, Complex(0.0))));
  out.A_t = t.sigma;
  out.b_t = t.V.adjoint().apply(phi.b);
  out.U = t.U;
  out.V = t.V;
  out.rank_s = t.rank_s;
  out.sigma_raw = t.sigma_raw.empty() ? t.sigma : t.sigma_raw;
  return out;
}

Normalization normalize(const ExpPoly& psi, const AffineMap& phi) { return normalize_with(psi, phi, svd(phi.A)); }

Normalization normalize(const WcoProblem& problem) {
  problem.validate();
  return normalize(problem.psi, problem.phi);
}

double m_at(const ExpPoly& psi, const AffineMap& phi, std::span<const Complex> z) {
  const CVector w = phi(z);
  return std::abs(psi(z)) * std::exp(0.5 * (norm_sq(w) - norm_sq(z)));
}

std::string to_string(ProfileMode m) {
  return m == ProfileMode::certified_single_freq ? "certified_single_freq" : "numeric";
}

EllProfile ell_profile(const Normalization& norm, double q, const QuadSpec& spec) {
  check_exponent("q", q);
  if (norm.rank_s == 0) throw DomainError("ell_profile: rank 0 is handled by the constant-map branch");
  return build_profile(norm, q, static_cast<std::size_t>(norm.rank_s), spec);
}

EllProfile m_profile(const Normalization& norm, const QuadSpec& spec) {
  return build_profile(norm, 2.0, norm.dim(), spec);
}

double log_ell_at(const EllProfile& p, std::span<const Complex> z) {
  const std::size_t s = static_cast<std::size_t>(p.s);
  if (z.size() != s) throw DimensionError("ell_at: expected a point of C^" + std::to_string(s));
  if (p.mode == ProfileMode::certified_single_freq) {
    double e = std::log(p.constant_factor);
    for (std::size_t i = 0; i < s; ++i) {
      const auto& c = p.coords[i];
      e += 0.5 * (c.a * c.a - 1.0) * std::norm(z[i]) + (z[i] * std::conj(c.w)).real();
    }
    return e + log_q_factor(p, z);
  }
  double e = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    const Complex img = i < s ? p.a[i] * z[i] + p.b_t[i] : p.b_t[i];
    e += std::norm(img) - (i < s ? std::norm(z[i]) : 0.0);
  }
  return 0.5 * e + std::log(slice_norm(p.psi_t, p.q, z, p.quad).value);
}

double ell_at(const EllProfile& p, std::span<const Complex> z_head) { return std::exp(log_ell_at(p, z_head)); }

std::vector<CVector> ray_directions(std::size_t s, int extra, std::uint64_t seed) {
  std::vector<CVector> dirs;
  for (std::size_t i = 0; i < s; ++i) {
    CVector e(s, Complex(0.0));
    e[i] = 1.0;
    dirs.push_back(std::move(e));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int k = 0; k < extra; ++k) {
    CVector d(s);
    for (auto& x : d) x = Complex(g(rng), g(rng));
    const double r = norm(d);
    for (auto& x : d) x /= r;
    dirs.push_back(std::move(d));
  }
  return dirs;
}

std::vector<RaySample> scan_rays(const EllProfile& p, const std::vector<double>& radii,
                                 const std::vector<CVector>& directions) {
  std::vector<RaySample> out;
  for (const auto& d : directions) {
    RaySample r{d, radii, {}};
    for (double t : radii) {
      CVector z(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) z[i] = t * d[i];
      r.log_ell.push_back(log_ell_at(p, z));
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

const std::vector<double> kScanRadii{0.0, 1.0, 2.0, 4.0, 8.0, 16.0};

}  // namespace

RayVerdict ray_verdict(const EllProfile& p) {
  RayVerdict v;
  v.tail_max = -kInf;
  v.rays = scan_rays(p, kScanRadii, ray_directions(static_cast<std::size_t>(p.s), 8, p.quad.seed));
  double top = -kInf;
  for (const auto& r : v.rays)
    for (double x : r.log_ell) top = std::max(top, x);
  for (const auto& r : v.rays) {
    const double last = r.log_ell.back(), prev = r.log_ell[r.log_ell.size() - 2];
    if (last - prev > std::log(1.5)) v.grows = true;
    if (!(last - top < std::log(1e-8))) v.decays = false;
    v.tail_max = std::max(v.tail_max, last);
  }
  return v;
}

namespace {

EllSup search_sup(const EllProfile& p, const std::vector<std::size_t>& free, double radius, CVector base) {
  const std::size_t d = free.size();
  const std::function<double(std::span<const Complex>)> objective = [&](std::span<const Complex> y) {
    CVector z = base;
    for (std::size_t k = 0; k < d; ++k) z[free[k]] = y[k];
    return log_ell_at(p, z);
  };
  std::vector<CVector> seeds{CVector(d, Complex(0.0))};
  if (p.mode == ProfileMode::certified_single_freq) {
    CVector mu(d);
    for (std::size_t k = 0; k < d; ++k) {
      const auto& c = p.coords[free[k]];
      mu[k] = c.w / (1.0 - c.a * c.a);
    }
    seeds.push_back(mu);
  }
  const SupSearch best = maximize_log(objective, d, radius, sup_grid_for(d), p.quad.refine_iters, seeds);
  CVector at = base;
  for (std::size_t k = 0; k < d; ++k) at[free[k]] = best.argmax[k];
  return EllSup{true, std::exp(best.log_value), NormMode::sup_search, at, {}};
}

}  // namespace

EllSup ell_sup(const EllProfile& p) {
  const std::size_t s = static_cast<std::size_t>(p.s);
  if (p.mode == ProfileMode::certified_single_freq) {
    for (std::size_t i = 0; i < s; ++i) {
      const auto& c = p.coords[i];
      if (c.a < 1.0 || flat(p, c)) continue;
      EllSup r{false, kInf, NormMode::closed_form, {}, {}};
      r.reason = "coordinate " + std::to_string(i) + " has a = 1 with " +
                 (c.deg > 0 ? "polynomial degree " + std::to_string(c.deg) : "w = " + num(c.w) + " != 0");
      return r;
    }
    if (p.pure_exponential) {
      double e = 0.0;
      CVector at(s, Complex(0.0));
      for (std::size_t i = 0; i < s; ++i) {
        const auto& c = p.coords[i];
        if (c.a == 1.0) continue;
        e += std::norm(c.w) / (2.0 * (1.0 - c.a * c.a));
        at[i] = c.w / (1.0 - c.a * c.a);
      }
      return EllSup{true, p.constant_factor * std::exp(e), NormMode::closed_form, at, {}};
    }
    std::vector<std::size_t> free;
    double reach = 0.0, rate = kInf;
    int deg = 0;
    for (std::size_t i = 0; i < s; ++i) {
      const auto& c = p.coords[i];
      if (c.a == 1.0) continue;
      free.push_back(i);
      reach = std::max(reach, std::abs(c.w) / (1.0 - c.a * c.a));
      rate = std::min(rate, 0.5 * (1.0 - c.a * c.a));
      deg = std::max(deg, c.deg);
    }
    if (free.empty()) {
      const CVector zero(s, Complex(0.0));
      return EllSup{true, ell_at(p, zero), NormMode::closed_form, zero, {}};
    }
    const double radius = reach + std::sqrt((2.0 * deg + 8.0) / rate) + 1.0;
    return search_sup(p, free, radius, CVector(s, Complex(0.0)));
  }

  const RayVerdict rv = ray_verdict(p);
  if (rv.grows) {
    EllSup r{false, kInf, NormMode::sup_search, {}, {}};
    r.reason = "sampled l grows by more than 1.5x between radius 8 and 16 on some ray";
    return r;
  }
  std::vector<std::size_t> all(s);
  for (std::size_t i = 0; i < s; ++i) all[i] = i;
  return search_sup(p, all, 8.0, CVector(s, Complex(0.0)));
}

double ell_limsup(const EllProfile& p) {
  if (p.mode != ProfileMode::certified_single_freq)
    throw DomainError("ell_limsup: closed form needs a certified single-frequency profile");
  const EllSup sup = ell_sup(p);
  if (!sup.finite) throw DomainError("ell_limsup: l is unbounded (" + sup.reason + ")");
  if (all_contracting(p)) return 0.0;
  return sup.value;
}

EllSup m_sup(const ExpPoly& psi, const AffineMap& phi, const QuadSpec& spec) {
  return ell_sup(m_profile(normalize(psi, phi), spec));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::unbounded: return "unbounded";
    case Verdict::bounded_not_compact: return "bounded_not_compact";
    case Verdict::compact: return "compact";
  }
  return "unknown";
}

std::string to_string(ClassMode m) { return m == ClassMode::certified ? "certified" : "numeric_evidence"; }

std::string to_string(BoundMode m) { return m == BoundMode::closed_form ? "closed_form" : "numeric"; }

namespace {

std::string exponent_branch(double p, double q) {
  return (p <= q ? "p <= q" : "q < p") + std::string(" (p = ") + num(p) + ", q = " + num(q) + ")";
}

Classification inadmissible(double norm_a, double raw) {
  Classification c;
  c.verdict = Verdict::unbounded;
  c.mode = ClassMode::certified;
  c.certificate = "spectral norm " + num(norm_a) + " > 1 (raw sigma_0 = " + num(raw) + ")";
  return c;
}

}  // namespace

Classification classify(const WcoProblem& problem) {
  problem.validate();
  const Normalization norm = normalize(problem);
  const double top = norm.A_t.front();
  if (top > 1.0 + kAdmissibilityTol) return inadmissible(top, norm.sigma_raw.front());

  Classification c;
  if (norm.rank_s == 0) {
    c.verdict = Verdict::compact;
    c.mode = ClassMode::certified;
    c.certificate = "rank 0: phi is constant, so W f = f(b) psi has rank one";
    return c;
  }
  const EllProfile prof = ell_profile(norm, problem.q, problem.quad);
  const std::string head = exponent_branch(problem.p, problem.q) + ", rank " + std::to_string(norm.rank_s) + ":";

  if (prof.mode == ProfileMode::certified_single_freq) {
    c.mode = ClassMode::certified;
    const std::string coords = describe_coords(prof);
    const bool contracting = all_contracting(prof);
    if (problem.p <= problem.q) {
      const EllSup sup = ell_sup(prof);
      if (!sup.finite) {
        c.verdict = Verdict::unbounded;
        c.certificate = head + coords + "; l is unbounded: " + sup.reason;
      } else if (contracting) {
        c.verdict = Verdict::compact;
        c.certificate = head + coords + "; every a_i < 1, so l decays to 0";
      } else {
        c.verdict = Verdict::bounded_not_compact;
        c.certificate = head + coords + "; l is finite but constant along a unit singular direction";
      }
    } else {
      c.verdict = contracting ? Verdict::compact : Verdict::unbounded;
      c.certificate = head + coords + (contracting ? "; every a_i < 1, so l lies in L^r (bounded and compact)"
                                                   : "; some a_i = 1, so l is not in L^r");
    }
    return c;
  }

  const RayVerdict rv = ray_verdict(prof);
  c.mode = ClassMode::numeric_evidence;
  c.evidence = rv.rays;
  const std::string base = head + " psi has several frequencies; verdict from l sampled on " +
                           std::to_string(rv.rays.size()) + " rays up to radius 16";
  if (problem.p <= problem.q) {
    if (rv.grows) c.verdict = Verdict::unbounded;
    else c.verdict = rv.decays ? Verdict::compact : Verdict::bounded_not_compact;
  } else {
    c.verdict = rv.decays ? Verdict::compact : Verdict::unbounded;
  }
  c.certificate = base + (rv.grows ? " (growth observed)" : rv.decays ? " (decay observed)" : " (no decay)");
  return c;
}

Classification composition_criterion(const AffineMap& phi, double p, double q) {
  check_exponent("p", p);
  check_exponent("q", q);
  const SvdTriple t = svd(phi.A);
  const std::size_t n = phi.dim();
  Classification c;
  c.mode = ClassMode::certified;
  if (n == 0) throw DimensionError("composition_criterion: empty map");
  if (t.sigma.front() > 1.0 + kAdmissibilityTol) return inadmissible(t.sigma.front(), t.sigma_raw.front());
  const std::size_t j = static_cast<std::size_t>(std::count(t.sigma.begin(), t.sigma.end(), 1.0));
  const CVector bt = t.V.adjoint().apply(phi.b);
  const double btol = 1e-10 * std::max(1.0, norm(phi.b));
  if (q < p) {
    c.verdict = j == 0 ? Verdict::compact : Verdict::unbounded;
    c.certificate = j == 0 ? "q < p and ||A|| = " + num(t.sigma.front()) + " < 1"
                           : "q < p and ||A|| = 1: " + std::to_string(j) + " unit singular value(s)";
    return c;
  }
  for (std::size_t i = 0; i < j; ++i)
    if (std::abs(bt[i]) > btol) {
      c.verdict = Verdict::unbounded;
      c.certificate = "b has component " + num(bt[i]) + " along unit singular direction " + std::to_string(i);
      return c;
    }
  if (j == 0) {
    c.verdict = Verdict::compact;
    c.certificate = "||A|| = " + num(t.sigma.front()) + " < 1";
  } else {
    c.verdict = Verdict::bounded_not_compact;
    c.certificate = "||A|| = 1 with " + std::to_string(j) + " unit singular value(s); b orthogonal to them";
  }
  return c;
}

NormBounds norm_bounds(const WcoProblem& problem) {
  const Classification cls = classify(problem);
  if (!cls.bounded()) throw DomainError("norm_bounds: operator is unbounded (" + cls.certificate + ")");
  const Normalization norm = normalize(problem);
  const std::size_t n = problem.dim();
  NormBounds nb;
  if (norm.rank_s == 0) {
    const NormResult r = fock_norm(problem.psi, problem.q, problem.quad);
    nb.lower = nb.upper = std::exp(0.5 * norm_sq(problem.phi.b)) * r.value;
    nb.mode = r.mode == NormMode::closed_form ? BoundMode::closed_form : BoundMode::numeric;
    return nb;
  }
  const double det = head_det(norm);
  const double p = problem.p, q = problem.q;
  const EllProfile prof = ell_profile(norm, q, problem.quad);
  if (p <= q) {
    const EllSup sup = ell_sup(prof);
    nb.lower = sup.value;
    nb.upper = std::pow(det, -2.0 / q) * std::pow(q / p, static_cast<double>(n) / q) * sup.value;
    nb.mode = sup.mode == NormMode::closed_form ? BoundMode::closed_form : BoundMode::numeric;
    return nb;
  }
  const CarlesonReport rep = carleson_integral(norm, p, q, problem.quad);
  if (!rep.member || !rep.lr_norm) throw DomainError("norm_bounds: l is not in L^r");
  const double l = rep.lr_norm->value;
  nb.lower = std::pow(det, 2.0 * (p - q) / (p * q)) * std::exp(-0.5 * tail_b_sq(norm)) * l;
  nb.upper = std::pow(det, -2.0 / p) * l;
  nb.upper_is_up_to_universal_constant = true;
  nb.mode = rep.mode == CarlesonMode::closed_form ? BoundMode::closed_form : BoundMode::numeric;
  return nb;
}

NormBounds essential_norm_bounds(const WcoProblem& problem) {
  problem.validate();
  if (!(problem.p > 1.0 && problem.p <= problem.q))
    throw UnsupportedError("essential-norm estimates require 1 < p <= q < infinity (got p = " + num(problem.p) +
                           ", q = " + num(problem.q) + ")");
  NormBounds nb = norm_bounds(problem);
  const Classification cls = classify(problem);
  if (cls.verdict == Verdict::compact) {
    nb.essential_lower = 0.0;
    nb.essential_upper = 0.0;
    return nb;
  }
  const Normalization norm = normalize(problem);
  const EllProfile prof = ell_profile(norm, problem.q, problem.quad);
  double limsup = 0.0;
  if (prof.mode == ProfileMode::certified_single_freq) {
    limsup = ell_limsup(prof);
  } else {
    limsup = std::exp(ray_verdict(prof).tail_max);
    nb.mode = BoundMode::numeric;
  }
  const double n = static_cast<double>(problem.dim());
  nb.essential_lower = limsup;
  nb.essential_upper = 2.0 * std::pow(head_det(norm), -2.0 / problem.q) * std::pow(problem.q / problem.p, n / problem.q) * limsup;
  return nb;
}

}  // namespace fockop
