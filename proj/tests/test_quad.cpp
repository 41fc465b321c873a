#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fockop/errors.hpp"
#include "fockop/quad.hpp"
#include "generators.hpp"

using namespace fockop;
using namespace std::complex_literals;

namespace {

QuadSpec forced() {
  QuadSpec s;
  s.allow_closed_form = false;
  return s;
}

}  // namespace

TEST_CASE("hermite rule") {
  const Rule& r = gauss_hermite(20);
  double w = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < r.x.size(); ++k) {
    w += r.w[k];
    m2 += r.w[k] * r.x[k] * r.x[k];
  }
  CHECK(w == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-14));
  const Rule& l = gauss_legendre(10);
  double lw = 0.0;
  for (double x : l.w) lw += x;
  CHECK(lw == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("normalized kernels have unit norm") {
  gen::Rng rng(31);
  for (double p : {0.5, 1.0, 2.0, 4.0})
    for (std::size_t n : {1u, 2u})
      for (int k = 0; k < 5; ++k) {
        const CVector w = gen::vec(rng, n, 2.0);
        const ExpPoly kw = normalized_kernel(w);
        CHECK(fock_norm(kw, p).value == doctest::Approx(1.0).epsilon(1e-12));
        const NormResult q = fock_norm(kw, p, forced());
        CHECK(q.mode == NormMode::quadrature);
        CHECK(std::abs(q.value - 1.0) <= 1e-6);
      }
}

TEST_CASE("norm examples") {
  for (double p : {0.5, 1.0, 3.0}) CHECK(fock_norm(ExpPoly::constant(2, 1.0), p).value == 1.0);
  for (int k = 0; k <= 6; ++k) {
    const ExpPoly zk = ExpPoly::monomial(1, 1.0, {k});
    const double expect = std::sqrt(std::tgamma(k + 1.0));
    CHECK(fock_norm(zk, 2.0).value == doctest::Approx(expect).epsilon(1e-13));
    CHECK(fock_norm(zk, 2.0, forced()).value == doctest::Approx(expect).epsilon(1e-12));
  }
  // p = 1 monomial: (2^{k/2} Gamma(k/2 + 1)).
  const ExpPoly z3 = ExpPoly::monomial(1, 1.0, {3});
  const double m1 = std::pow(2.0, 1.5) * std::tgamma(2.5);
  CHECK(fock_norm(z3, 1.0).value == doctest::Approx(m1).epsilon(1e-13));
  const NormResult q = fock_norm(z3, 1.0, forced());
  CHECK(std::abs(q.value - m1) <= std::max(q.err_estimate, 1e-6));
  CHECK_THROWS_AS(fock_norm(z3, 0.0), DomainError);
  CHECK_THROWS_AS(fock_norm(z3, -1.0), DomainError);
  CHECK_THROWS_AS(fock_norm(z3, std::numeric_limits<double>::infinity()), DomainError);
  CHECK(fock_norm(ExpPoly(2), 2.0).value == 0.0);
}

TEST_CASE("p = 2 norms equal the coefficient sum over the orthogonal monomials") {
  // ||sum c_a z^a||_2^2 = sum |c_a|^2 a!.
  gen::Rng rng(32);
  for (int k = 0; k < 50; ++k) {
    const ExpPoly f = gen::exppoly(rng, 2, {5, 4, 0.0});
    double s = 0.0;
    for (const auto& t : f.terms()) s += std::norm(t.coeff) * std::tgamma(t.power[0] + 1.0) * std::tgamma(t.power[1] + 1.0);
    CHECK(fock_norm(f, 2.0).value == doctest::Approx(std::sqrt(s)).epsilon(1e-12));
  }
}

TEST_CASE("kernel sums: ||sum a_j K_{w_j}||_2^2 = sum a_j conj(a_l) e^{<w_l, w_j>}") {
  gen::Rng rng(33);
  for (int k = 0; k < 30; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 2));
    std::vector<Term> terms;
    for (int j = 0; j < 3; ++j) terms.push_back(Term{gen::disc(rng), MultiIndex(n, 0), gen::vec(rng, n, 1.5)});
    double s = 0.0;
    for (const auto& x : terms)
      for (const auto& y : terms) s += (x.coeff * std::conj(y.coeff) * std::exp(inner(y.freq, x.freq))).real();
    const NormResult r = fock_norm(ExpPoly(n, terms), 2.0);
    CHECK(std::abs(r.value - std::sqrt(s)) <= 1e-9 * std::sqrt(s) + r.err_estimate);
  }
}

TEST_CASE("monte carlo agrees with gauss-hermite") {
  gen::Rng rng(34);
  for (int k = 0; k < 5; ++k) {
    const ExpPoly f = gen::exppoly(rng, 1, {3, 2, 1.0});
    QuadSpec mc;
    mc.method = QuadMethod::monte_carlo;
    mc.samples = 200000;
    mc.seed = 77 + static_cast<std::uint64_t>(k);
    mc.allow_closed_form = false;
    const NormResult a = fock_norm(f, 1.5, mc);
    const NormResult b = fock_norm(f, 1.5);
    CHECK(a.mode == NormMode::monte_carlo);
    CHECK(std::abs(a.value - b.value) <= 2.0 * a.err_estimate + b.err_estimate);
  }
}

TEST_CASE("sup norm examples") {
  CHECK(fock_sup_norm(ExpPoly::constant(1, 1.0)).value == 1.0);
  const CVector w{0.7 - 1.2i, 0.4};
  CHECK(fock_sup_norm(kernel(w)).value == doctest::Approx(std::exp(0.5 * norm_sq(w))).epsilon(1e-14));
  CHECK(fock_sup_norm(ExpPoly::coordinate(1, 0)).value == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));

  QuadSpec s = forced();
  const NormResult a = fock_sup_norm(kernel(w), s);
  CHECK(a.mode == NormMode::sup_search);
  CHECK(a.value == doctest::Approx(std::exp(0.5 * norm_sq(w))).epsilon(1e-10));
  const NormResult b = fock_sup_norm(ExpPoly::coordinate(1, 0), s);
  CHECK(b.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
  CHECK(b.search_radius > 1.0);
}

TEST_CASE("slice norm examples") {
  const CVector head{0.4 - 0.3i};
  CHECK(slice_norm(ExpPoly::constant(2, 1.0), 2.0, head).value == 1.0);
  const CVector c{0.6 + 0.2i, -0.5i};
  const double expect = std::abs(std::exp(head[0] * std::conj(c[0]))) * std::exp(0.5 * std::norm(c[1]));
  for (double q : {1.0, 2.0, 2.5})
    CHECK(slice_norm(kernel(c), q, head).value == doctest::Approx(expect).epsilon(1e-13));
  const CVector full{2.0, 3.0i};
  CHECK(slice_norm(ExpPoly::coordinate(2, 0), 2.0, full).value == 2.0);
  CHECK_THROWS_AS(slice_norm(ExpPoly::coordinate(2, 0), 2.0, CVector{}), DomainError);
}

TEST_CASE("pointwise, inclusion and slice inequalities") {
  gen::Rng rng(35);
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 2));
    const ExpPoly f = gen::exppoly(rng, n, {3, 2, 1.0});
    const double p = gen::uniform(rng, 0.5, 4.0);
    const NormResult np = fock_norm(f, p);
    const CVector z = gen::vec(rng, n, 3.0);
    CHECK(std::abs(f(z)) * std::exp(-0.5 * norm_sq(z)) <= np.value + np.err_estimate + 1e-12);

    const double q = gen::uniform(rng, p, 6.0);
    const NormResult nq = fock_norm(f, q);
    CHECK(nq.value <= std::pow(q / p, n / q) * (np.value + np.err_estimate) + nq.err_estimate + 1e-12);

    const NormResult sup = fock_sup_norm(f);
    CHECK(sup.value <= np.value + np.err_estimate + 1e-12);
  }
  for (int k = 0; k < 40; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 2, 3));
    const ExpPoly f = gen::exppoly(rng, n, {3, 2, 1.0});
    const double p = k % 2 ? 2.0 : 4.0;
    const std::size_t s = static_cast<std::size_t>(gen::uniform_int(rng, 1, static_cast<int>(n) - 1));
    const CVector b = gen::vec(rng, s, 2.5);
    const NormResult whole = fock_norm(f, p);
    const NormResult part = slice_norm(f, p, b);
    CHECK(part.value * std::exp(-0.5 * norm_sq(b)) <= whole.value + whole.err_estimate + part.err_estimate + 1e-12);
  }
}

TEST_CASE("doubling nodes stays within the reported error") {
  gen::Rng rng(36);
  for (int k = 0; k < 10; ++k) {
    const ExpPoly f = gen::exppoly(rng, 1, {3, 2, 1.0});
    for (double p : {1.0, 3.0}) {
      QuadSpec a;
      a.nodes_per_axis = 40;
      QuadSpec b;
      b.nodes_per_axis = 80;
      const NormResult x = fock_norm(f, p, a), y = fock_norm(f, p, b);
      CHECK(std::abs(x.value - y.value) <= x.err_estimate + 1e-12 * x.value);
    }
  }
}
