#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fockop/errors.hpp"
#include "fockop/funcspace.hpp"
#include "generators.hpp"

using namespace fockop;
using namespace std::complex_literals;

namespace {

// Direct evaluation of the defining sum, independent of ExpPoly::operator().
Complex naive_eval(const std::vector<Term>& terms, const CVector& z) {
  Complex s = 0.0;
  for (const auto& t : terms) {
    Complex v = t.coeff;
    for (std::size_t i = 0; i < z.size(); ++i) v *= std::pow(z[i], t.power[i]);
    v *= std::exp(inner(z, t.freq));
    s += v;
  }
  return s;
}

bool agree_at_random_points(const ExpPoly& f, const ExpPoly& g, gen::Rng& rng, int points,
                            double rel) {
  for (int k = 0; k < points; ++k) {
    const CVector z = gen::vec(rng, f.dim(), 2.0);
    if (!gen::close(f(z), g(z), rel, 1e-12)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("eval examples") {
  const CVector z{0.3 - 1.0i, 2.0};
  CHECK(ExpPoly::constant(2, 1.0)(z) == Complex(1.0));
  const CVector w{1.0, 0.0};
  CHECK(std::abs(kernel(w)(w) - std::exp(1.0)) < 1e-15);

  const ExpPoly f(2, {Term{1.0, {2, 0}, {0.0, 1.0}}});
  const CVector p{2.0, 1.0i};
  CHECK(std::abs(f(p) - 4.0 * std::exp(1.0i)) < 1e-14);
  CHECK_THROWS_AS(f(CVector{1.0}), DimensionError);
}

TEST_CASE("eval matches the defining sum") {
  gen::Rng rng(21);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
    const ExpPoly f = gen::exppoly(rng, n, {5, 3, 1.5});
    const CVector z = gen::vec(rng, n, 3.0);
    CHECK(gen::close(f(z), naive_eval(f.terms(), z), 1e-12, 1e-14));
  }
}

TEST_CASE("kernels") {
  const CVector zero{0.0, 0.0};
  CHECK(same_form(kernel(zero), ExpPoly::constant(2, 1.0)));
  CHECK(same_form(normalized_kernel(zero), ExpPoly::constant(2, 1.0)));
  const CVector w{0.5 + 1.0i, -0.25};
  CHECK(std::abs(normalized_kernel(w)(w) - std::exp(0.5 * norm_sq(w))) < 1e-14);
}

TEST_CASE("canonical form") {
  const ExpPoly f(1, {Term{1.0, {1}, {0.0}}, Term{2.0, {1}, {1e-14}}, Term{-3.0, {1}, {0.0}},
                      Term{1.0, {0}, {0.5}}});
  REQUIRE(f.terms().size() == 1);
  CHECK(f.terms()[0].power == MultiIndex{0});

  const ExpPoly tiny(1, {Term{1.0, {0}, {0.0}}, Term{1e-16, {1}, {0.0}}});
  CHECK(tiny.terms().size() == 1);

  gen::Rng rng(22);
  for (int k = 0; k < 200; ++k) {
    const ExpPoly g = gen::exppoly(rng, 2, {6, 3, 1.0});
    const ExpPoly c1 = canonicalize(g);
    const ExpPoly c2 = canonicalize(c1);
    CHECK(same_form(c1, c2, 0.0));
    CHECK(same_form(c1, g, 0.0));
  }
  CHECK_THROWS_AS(ExpPoly(2, {Term{1.0, {1}, {0.0, 0.0}}}), DimensionError);
  CHECK_THROWS_AS(ExpPoly(1, {Term{1.0, {-1}, {0.0}}}), DomainError);
}

TEST_CASE("multiply") {
  const ExpPoly z = ExpPoly::coordinate(1, 0);
  const ExpPoly one = ExpPoly::constant(1, 1.0);
  CHECK(same_form(multiply(z + one, z - one), multiply(z, z) - one));
  const CVector u{1.0 + 0.5i}, v{-0.25i};
  CHECK(same_form(multiply(kernel(u), kernel(v)), kernel(CVector{u[0] + v[0]})));

  gen::Rng rng(23);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
    const gen::PolyShape shape{5, 2, 1.0};
    const ExpPoly f = gen::exppoly(rng, n, shape), g = gen::exppoly(rng, n, shape),
                  h = gen::exppoly(rng, n, shape);
    CHECK(same_form(multiply(f, ExpPoly::constant(n, 1.0)), f));
    CHECK(same_form(multiply(f, g), multiply(g, f), 1e-12));
    CHECK(same_form(multiply(multiply(f, g), h), multiply(f, multiply(g, h)), 1e-12));
    const AffineMap phi = gen::affine(rng, n, 1.0, 1.0);
    CHECK(same_form(compose_affine(multiply(f, g), phi),
                    multiply(compose_affine(f, phi), compose_affine(g, phi)), 1e-10));
    const CVector z = gen::vec(rng, n, 2.0);
    CHECK(gen::close(multiply(f, g)(z), f(z) * g(z), 1e-12, 1e-14));
  }
}

TEST_CASE("compose_affine") {
  gen::Rng rng(24);
  const ExpPoly f = gen::exppoly(rng, 2, {4, 3, 1.0});
  CHECK(same_form(compose_affine(f, AffineMap::identity(2)), f));

  const Complex a = 0.5 - 0.25i, b = 1.0 + 2.0i;
  const ExpPoly sq = ExpPoly::monomial(1, 1.0, {2});
  const AffineMap phi1(CMatrix(1, {a}), {b});
  const ExpPoly expected(1, {Term{a * a, {2}, {0.0}}, Term{2.0 * a * b, {1}, {0.0}},
                             Term{b * b, {0}, {0.0}}});
  CHECK(same_form(compose_affine(sq, phi1), expected, 1e-14));

  for (int k = 0; k < 100; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
    const CVector w = gen::vec(rng, n, 2.0);
    const AffineMap phi = gen::affine(rng, n, 1.0, 1.0);
    const ExpPoly lhs = compose_affine(kernel(w), phi);
    const ExpPoly rhs = kernel(phi.A.adjoint().apply(w)).scaled(std::exp(inner(phi.b, w)));
    CHECK(same_form(lhs, rhs, 1e-12));
    CHECK(agree_at_random_points(lhs, rhs, rng, 100, 1e-12));

    const ExpPoly g = gen::exppoly(rng, n, {4, 3, 1.0});
    const CVector z = gen::vec(rng, n, 2.0);
    CHECK(gen::close(compose_affine(g, phi)(z), g(phi(z)), 1e-10, 1e-12));
  }
}

TEST_CASE("composition is functorial") {
  gen::Rng rng(25);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = static_cast<std::size_t>(gen::uniform_int(rng, 1, 3));
    const ExpPoly f = gen::exppoly(rng, n, {4, 3, 1.0});
    const AffineMap p1 = gen::affine(rng, n, 1.0, 1.0), p2 = gen::affine(rng, n, 1.0, 1.0);
    const ExpPoly lhs = compose_affine(f, compose(p2, p1));
    const ExpPoly rhs = compose_affine(compose_affine(f, p2), p1);
    CHECK(agree_at_random_points(lhs, rhs, rng, 5, 1e-9));
  }
}

TEST_CASE("term cap") {
  const ExpPoly f = ExpPoly::monomial(3, 1.0, {6, 6, 6});
  gen::Rng rng(26);
  const AffineMap phi = gen::affine(rng, 3, 1.0, 1.0);
  CHECK_THROWS_AS(compose_affine(f, phi, 50), ResourceError);
  CHECK_THROWS_AS(multiply(gen::exppoly(rng, 2, {5, 1, 1.0}), gen::exppoly(rng, 2, {5, 1, 1.0}), 0),
                  ResourceError);
}

TEST_CASE("slices") {
  const ExpPoly indep = ExpPoly(2, {Term{2.0, {0, 3}, {0.0, 0.5i}}});
  const CVector pre{1.5 - 1.0i};
  CHECK(same_form(slice_head(indep, pre), ExpPoly(1, {Term{2.0, {3}, {0.5i}}})));

  const CVector w{0.5 + 1.0i, -0.7};
  const CVector b1{0.3 + 0.2i};
  const ExpPoly sliced = slice_head(kernel(w), b1);
  const ExpPoly expect = kernel(CVector{w[1]}).scaled(std::exp(b1[0] * std::conj(w[0])));
  CHECK(same_form(sliced, expect, 1e-14));

  const ExpPoly z1z2 = ExpPoly::monomial(2, 1.0, {1, 1});
  CHECK(same_form(slice_head(z1z2, CVector{2.0}), ExpPoly::monomial(1, 2.0, {1})));
  CHECK(same_form(slice_tail(z1z2, CVector{2.0}), ExpPoly::monomial(1, 2.0, {1})));
  const ExpPoly indep_tail = ExpPoly(2, {Term{2.0, {3, 0}, {0.5i, 0.0}}});
  CHECK(same_form(slice_tail(indep_tail, pre), ExpPoly(1, {Term{2.0, {3}, {0.5i}}})));
  CHECK(same_form(slice_tail(kernel(w), b1),
                  kernel(CVector{w[0]}).scaled(std::exp(b1[0] * std::conj(w[1]))), 1e-14));

  CHECK_THROWS_AS(slice_head(z1z2, CVector{}), DomainError);
  CHECK_THROWS_AS(slice_head(z1z2, CVector{1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(slice_tail(z1z2, CVector{1.0, 2.0}), DomainError);
}

TEST_CASE("slice consistency") {
  gen::Rng rng(27);
  for (int k = 0; k < 200; ++k) {
    const ExpPoly f = gen::exppoly(rng, 3, {5, 3, 1.0});
    const CVector z = gen::vec(rng, 3, 2.0);
    const Complex full = f(z);
    const Complex head_then_tail = slice_tail(slice_head(f, CVector{z[0]}), CVector{z[2]})(CVector{z[1]});
    const Complex tail_then_head = slice_head(slice_tail(f, CVector{z[2]}), CVector{z[0]})(CVector{z[1]});
    const Complex two = slice_head(f, CVector{z[0], z[1]})(CVector{z[2]});
    CHECK(gen::close(head_then_tail, full, 1e-12, 1e-14));
    CHECK(gen::close(tail_then_head, full, 1e-12, 1e-14));
    CHECK(gen::close(two, full, 1e-12, 1e-14));
  }
}

TEST_CASE("apply_wco") {
  gen::Rng rng(28);
  const ExpPoly f = gen::exppoly(rng, 2, {4, 2, 1.0});
  CHECK(same_form(apply_wco(ExpPoly::constant(2, 1.0), AffineMap::identity(2), f), f));

  const CVector b{0.5, -1.0i};
  const AffineMap constant_map(CMatrix(2), b);
  CHECK(same_form(apply_wco(ExpPoly::constant(2, 1.0), constant_map, f), ExpPoly::constant(2, f(b)),
                  1e-13));

  for (int k = 0; k < 20; ++k) {
    const CVector u = gen::vec(rng, 2, 1.5), w = gen::vec(rng, 2, 1.5);
    const AffineMap phi(gen::matrix(rng, 2), CVector(2, Complex(0.0)));
    const ExpPoly r = apply_wco(normalized_kernel(u), phi, normalized_kernel(w));
    for (int j = 0; j < 100; ++j) {
      const CVector z = gen::vec(rng, 2, 2.0);
      CHECK(gen::close(r(z), normalized_kernel(u)(z) * normalized_kernel(w)(phi.A.apply(z)), 1e-12));
    }
  }
}
