#include "fockop/commands.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "fockop/carleson.hpp"
#include "fockop/errors.hpp"
#include "fockop/oracle.hpp"

namespace fockop {

namespace {

std::string fmt(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream o;
  o.precision(10);
  o << x;
  return o.str();
}

bool constant_symbol(const ExpPoly& psi) {
  return psi.terms().size() == 1 && psi.max_degree() == 0 && norm(psi.terms()[0].freq) == 0.0 &&
         psi.terms()[0].coeff == Complex(1.0);
}

double ell_sup_value(const WcoProblem& pr) {
  if (admissibility(pr) != Admissibility::admissible) return std::numeric_limits<double>::infinity();
  const Normalization nm = normalize(pr);
  if (nm.rank_s == 0) return 0.0;
  const EllSup s = ell_sup(ell_profile(nm, pr.q, pr.quad));
  return s.finite ? s.value : std::numeric_limits<double>::infinity();
}

BoundsSection section(double lower, double upper, BoundMode mode, bool flag) {
  return {lower, upper, to_string(mode), flag};
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::classify: return "classify";
    case Command::bounds: return "bounds";
    case Command::essnorm: return "essnorm";
    case Command::oracle: return "oracle";
  }
  return "unknown";
}

Report run_command(Command cmd, const WcoProblem& pr, const std::string& source, const CommandOptions& opts) {
  pr.validate();
  if (cmd == Command::essnorm && !(pr.p > 1.0 && pr.p <= pr.q))
    throw UnsupportedError("essential-norm estimates need 1 < p <= q < inf; got p = " + fmt(pr.p) + ", q = " +
                           fmt(pr.q));
  Report r;
  r.tool_version = FOCKOP_VERSION;
  r.command = to_string(cmd);
  r.source = source;
  r.problem = problem_to_json(pr);
  r.quad = quad_to_json(pr.quad.resolved(pr.dim()));
  const Classification c = classify(pr);
  r.verdict = to_string(c.verdict);
  r.mode = to_string(c.mode);
  r.certificate = c.certificate;
  r.ell_sup = ell_sup_value(pr);
  if (normalize(pr).rank_s == 0 && admissibility(pr) == Admissibility::admissible)
    r.note = "rank 0: ell is not defined; the norm is exact";
  if (cmd == Command::classify) return r;

  if (!c.bounded()) {
    r.note = "operator is unbounded; no norm bounds";
    return r;
  }
  if (cmd == Command::essnorm) {
    const NormBounds nb = essential_norm_bounds(pr);
    r.bounds = section(nb.lower, nb.upper, nb.mode, nb.upper_is_up_to_universal_constant);
    r.essential = section(*nb.essential_lower, *nb.essential_upper, nb.mode, false);
    return r;
  }
  const NormBounds nb = norm_bounds(pr);
  r.bounds = section(nb.lower, nb.upper, nb.mode, nb.upper_is_up_to_universal_constant);
  if (cmd == Command::oracle) {
    OracleSection o;
    o.max_degree = opts.oracle_degree;
    if (pr.p == 2.0 && pr.q == 2.0) {
      o.truncated_norm = truncated_norm(f2_matrix(pr, {opts.oracle_degree, pr.quad}));
      o.essential_upper = truncated_essential_upper(pr, opts.oracle_degree, pr.quad);
    }
    FamilySpec fam;
    fam.seed = pr.quad.seed;
    for (const auto& s : rayleigh_sweep(pr, fam))
      if (s.quotient > o.max_quotient) {
        o.max_quotient = s.quotient;
        o.argmax_descriptor = s.descriptor;
      }
    r.oracle = o;
  }
  return r;
}

Suite suite_from_string(const std::string& name) {
  if (name == "lemmas") return Suite::lemmas;
  if (name == "sandwich") return Suite::sandwich;
  if (name == "normalization") return Suite::normalization;
  if (name == "classification") return Suite::classification;
  if (name == "all") return Suite::all;
  throw ParseError("unknown suite \"" + name + "\"");
}

std::string to_string(Suite s) {
  switch (s) {
    case Suite::lemmas: return "lemmas";
    case Suite::sandwich: return "sandwich";
    case Suite::normalization: return "normalization";
    case Suite::classification: return "classification";
    case Suite::all: return "all";
  }
  return "unknown";
}

std::size_t VerifySummary::passed() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return c.passed; }));
}

std::size_t VerifySummary::failed() const { return checks.size() - passed(); }

std::vector<std::filesystem::path> problem_files(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw ParseError("no such file or directory: " + path.string());
  if (!fs::is_directory(path)) return {path};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int thread_budget() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("FOCKOP_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) return std::min(cap, hw);
  }
  return hw;
}

namespace {

struct Checker {
  std::string suite;
  std::string source;
  std::vector<CheckResult>& out;

  void operator()(const std::string& property, bool ok, const std::string& detail) {
    out.push_back({suite, property, source, ok, ok ? std::string() : detail});
  }
};

std::mt19937_64 seeded(std::size_t index) { return std::mt19937_64(20240611ULL + 7919ULL * index); }

CVector point(std::mt19937_64& rng, std::size_t n, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector z(n);
  for (auto& x : z) x = Complex(u(rng), u(rng)) * (radius / std::sqrt(2.0 * static_cast<double>(n)));
  return z;
}

void lemma_checks(const WcoProblem& pr, std::mt19937_64& rng, Checker& check) {
  const std::size_t n = pr.dim();
  const NormResult np = fock_norm(pr.psi, pr.p, pr.quad), nq = fock_norm(pr.psi, pr.q, pr.quad);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const CVector z = point(rng, n, 4.0);
    worst = std::max(worst, std::abs(pr.psi(z)) * std::exp(-0.5 * norm_sq(z)));
  }
  check("pointwise", worst <= np.value + np.err_estimate + 1e-12,
        "|psi(z)|e^{-|z|^2/2} = " + fmt(worst) + " > ||psi||_p = " + fmt(np.value));

  const bool up = pr.p <= pr.q;
  const double lo = up ? pr.p : pr.q, hi = up ? pr.q : pr.p;
  const NormResult& small = up ? np : nq;
  const NormResult& big = up ? nq : np;
  const double c = std::pow(hi / lo, static_cast<double>(n) / hi);
  check("inclusion", big.value <= c * (small.value + small.err_estimate) + big.err_estimate + 1e-12,
        "||psi||_" + fmt(hi) + " = " + fmt(big.value) + " > " + fmt(c) + " * " + fmt(small.value));

  for (std::size_t s = 1; s < n; ++s) {
    const CVector head = point(rng, s, 2.5);
    const NormResult part = slice_norm(pr.psi, pr.q, head, pr.quad);
    const double lhs = part.value * std::exp(-0.5 * norm_sq(head));
    check("slice/" + std::to_string(s), lhs <= nq.value + nq.err_estimate + part.err_estimate + 1e-12,
          "slice " + fmt(lhs) + " > " + fmt(nq.value));
  }
  const CVector w = point(rng, n, 3.0);
  const double kn = fock_norm(normalized_kernel(w), pr.p, pr.quad).value;
  check("kernel-norm", std::abs(kn - 1.0) <= 1e-6, "||k_w||_p = " + fmt(kn));
}

void sandwich_checks(const WcoProblem& pr, std::mt19937_64& rng, Checker& check) {
  const Classification c = classify(pr);
  if (!c.bounded() || c.mode != ClassMode::certified) return;
  const NormBounds nb = norm_bounds(pr);
  const Normalization nm = normalize(pr);
  const std::size_t n = pr.dim();
  if (nm.rank_s == 0) {
    const NormResult r = fock_norm(apply_to_kernel(pr, pr.phi.b), pr.q, pr.quad);
    check("rank0-exact", std::abs(r.value - nb.lower) <= 1e-6 * std::max(1.0, nb.lower),
          "||W k_b|| = " + fmt(r.value) + " vs " + fmt(nb.lower));
    return;
  }
  if (pr.p == 2.0 && pr.q == 2.0) {
    const double t = truncated_norm(f2_matrix(pr, {8, pr.quad}));
    check("truncation", t <= nb.upper * (1.0 + 1e-6) + 1e-6,
          "truncated norm " + fmt(t) + " exceeds upper " + fmt(nb.upper));
  }
  const EllProfile prof = ell_profile(nm, pr.q, pr.quad);
  FamilySpec fam;
  fam.seed = pr.quad.seed;
  fam.monomial_degree = 2;
  for (int k = 0; k < 3; ++k) fam.phi_points.push_back(point(rng, n, 2.0));
  const auto samples = rayleigh_sweep(pr, fam);
  for (std::size_t k = 0; k < fam.phi_points.size(); ++k) {
    const RayleighSample& s = samples[samples.size() - fam.phi_points.size() + k];
    const CVector uz = nm.U.apply(fam.phi_points[k]);
    const double ell = ell_at(prof, CVector(uz.begin(), uz.begin() + nm.rank_s));
    check("kernel-lower/" + std::to_string(k), s.quotient + s.err_estimate >= ell * (1.0 - 1e-9),
          "||W k_phi(z)|| = " + fmt(s.quotient) + " < l = " + fmt(ell));
  }
  if (!nb.upper_is_up_to_universal_constant) {
    double top = 0.0;
    std::string at;
    for (const auto& s : samples)
      if (s.quotient > top) {
        top = s.quotient;
        at = s.descriptor;
      }
    check("rayleigh-upper", top <= nb.upper * (1.0 + 1e-6) + 1e-6,
          "quotient " + fmt(top) + " at " + at + " exceeds upper " + fmt(nb.upper));
  }
}

CMatrix block_unitary(const std::vector<double>& sigma, std::mt19937_64& rng) {
  const std::size_t n = sigma.size();
  CMatrix h(n);
  std::normal_distribution<double> g;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && std::abs(sigma[end] - sigma[start]) <= 1e-12) ++end;
    const Eigen::Index m = static_cast<Eigen::Index>(end - start);
    Eigen::MatrixXcd r(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) r(i, j) = Complex(g(rng), g(rng));
    const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(r).householderQ();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        h(start + static_cast<std::size_t>(i), start + static_cast<std::size_t>(j)) = q(i, j);
    start = end;
  }
  return h;
}

void normalization_checks(const WcoProblem& pr, std::mt19937_64& rng, Checker& check) {
  if (admissibility(pr) != Admissibility::admissible) return;
  const std::size_t n = pr.dim();
  const Normalization nm = normalize(pr);
  const AffineMap phit = nm.phi_t();
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CVector z = point(rng, n, 3.0);
    const double a = m_at(pr.psi, pr.phi, z), b = m_at(nm.psi_t, phit, nm.U.apply(z));
    worst = std::max(worst, std::abs(a - b) / std::max({a, b, 1e-300}));
  }
  check("conjugation", worst <= 1e-9, "m_z relative mismatch " + fmt(worst));
  if (nm.rank_s == 0) return;

  SvdTriple alt = svd(pr.phi.A);
  const CMatrix h = block_unitary(alt.sigma, rng);
  alt.V = alt.V * h;
  alt.U = h.adjoint() * alt.U;
  const Normalization other = normalize_with(pr.psi, pr.phi, alt);
  const EllProfile p1 = ell_profile(nm, pr.q, pr.quad), p2 = ell_profile(other, pr.q, pr.quad);
  const EllSup s1 = ell_sup(p1), s2 = ell_sup(p2);
  const bool same_sup = s1.finite == s2.finite && (!s1.finite || std::abs(s1.value - s2.value) <= 1e-8 * s1.value);
  check("ell-sup", same_sup, "ell_sup " + fmt(s1.value) + " vs " + fmt(s2.value));
  if (p1.mode == ProfileMode::certified_single_freq && s1.finite) {
    const double l1 = ell_limsup(p1), l2 = ell_limsup(p2);
    check("ell-limsup", std::abs(l1 - l2) <= 1e-8 * std::max(1.0, l1), "limsup " + fmt(l1) + " vs " + fmt(l2));
  }
  if (pr.q < pr.p) {
    const CarlesonReport c1 = carleson_integral(nm, pr.p, pr.q, pr.quad),
                         c2 = carleson_integral(other, pr.p, pr.q, pr.quad);
    const bool same = c1.member == c2.member &&
                      (!c1.member || std::abs(c1.lr_norm->value - c2.lr_norm->value) <= 1e-8 * c1.lr_norm->value);
    check("lr-norm", same, "L^r norms differ");
  }
}

void classification_checks(const WcoProblem& pr, Checker& check) {
  const Classification c = classify(pr);
  if (constant_symbol(pr.psi)) {
    const Classification k = composition_criterion(pr.phi, pr.p, pr.q);
    check("composition-criterion", k.verdict == c.verdict,
          "classify says " + to_string(c.verdict) + ", criterion says " + to_string(k.verdict));
  }
  if (admissibility(pr) != Admissibility::admissible || c.mode != ClassMode::certified) return;
  const Normalization nm = normalize(pr);
  if (nm.rank_s == 0) return;
  EllProfile def = ell_profile(nm, pr.q, pr.quad);
  def.mode = ProfileMode::numeric;
  const std::size_t s = static_cast<std::size_t>(nm.rank_s);
  bool grows = false, decays = true;
  double top = -INFINITY;
  const auto dirs = ray_directions(s, 8, pr.quad.seed);
  std::vector<CVector> probes;
  for (const auto& d : dirs) {
    probes.push_back(d);
    CVector neg = d;
    for (auto& x : neg) x = -x;
    probes.push_back(neg);
    CVector rot = d;
    for (auto& x : rot) x *= Complex(0.0, 1.0);
    probes.push_back(rot);
  }
  std::vector<std::pair<double, double>> ends;
  for (const auto& d : probes) {
    CVector z16(s), z32(s);
    for (std::size_t i = 0; i < s; ++i) {
      z16[i] = 16.0 * d[i];
      z32[i] = 32.0 * d[i];
    }
    ends.emplace_back(log_ell_at(def, z16), log_ell_at(def, z32));
    top = std::max(top, log_ell_at(def, CVector(s, Complex(0.0))));
  }
  for (const auto& [a, b] : ends) {
    if (b - a > std::log(1.5)) grows = true;
    if (!(b - top < std::log(1e-6))) decays = false;
  }
  const bool finite = ell_sup(ell_profile(nm, pr.q, pr.quad)).finite;
  check("ell-finite", finite != grows, std::string("certified finite = ") + (finite ? "yes" : "no") +
                                           ", sampled growth = " + (grows ? "yes" : "no"));
  const EllProfile prof = ell_profile(nm, pr.q, pr.quad);
  const bool contracting = std::all_of(prof.coords.begin(), prof.coords.end(), [](const auto& x) { return x.a < 1.0; });
  if (finite) check("ell-decay", contracting == decays, std::string("decay sampled = ") + (decays ? "yes" : "no"));
}

std::vector<CheckResult> verify_one(const NamedProblem& np, Suite suite, std::size_t index) {
  std::vector<CheckResult> out;
  const auto run = [&](Suite s, const std::function<void(Checker&)>& body) {
    if (suite != Suite::all && suite != s) return;
    Checker check{to_string(s), np.first, out};
    try {
      body(check);
    } catch (const std::exception& e) {
      check("no-exception", false, e.what());
    }
  };
  run(Suite::lemmas, [&](Checker& c) {
    auto rng = seeded(index);
    lemma_checks(np.second, rng, c);
  });
  run(Suite::sandwich, [&](Checker& c) {
    auto rng = seeded(index + 1000);
    sandwich_checks(np.second, rng, c);
  });
  run(Suite::normalization, [&](Checker& c) {
    auto rng = seeded(index + 2000);
    normalization_checks(np.second, rng, c);
  });
  run(Suite::classification, [&](Checker& c) { classification_checks(np.second, c); });
  return out;
}

}  // namespace

VerifySummary verify(const std::vector<NamedProblem>& problems, Suite suite, int threads) {
  std::vector<std::vector<CheckResult>> per(problems.size());
  const int budget = threads > 0 ? threads : thread_budget();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(budget), problems.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < problems.size(); i = next++) per[i] = verify_one(problems[i], suite, i);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  VerifySummary s;
  for (auto& v : per) s.checks.insert(s.checks.end(), v.begin(), v.end());
  return s;
}

std::string summary_to_text(const VerifySummary& s) {
  std::ostringstream o;
  for (const auto& c : s.checks) {
    o << (c.passed ? "PASS " : "FAIL ") << c.suite << "/" << c.property << " " << c.source;
    if (!c.passed) o << "  counterexample: " << c.detail;
    o << "\n";
  }
  o << "summary: " << s.passed() << " passed, " << s.failed() << " failed\n";
  return o.str();
}

Json summary_to_json(const VerifySummary& s) {
  Json checks = Json::array();
  for (const auto& c : s.checks) {
    Json j{{"suite", c.suite}, {"property", c.property}, {"source", c.source}, {"passed", c.passed}};
    if (!c.passed) j["counterexample"] = c.detail;
    checks.push_back(j);
  }
  return Json{{"tool_version", FOCKOP_VERSION}, {"passed", s.passed()}, {"failed", s.failed()}, {"checks", checks}};
}

}  // namespace fockop
