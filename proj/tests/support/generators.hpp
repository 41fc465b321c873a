#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "fockop/funcspace.hpp"
#include "fockop/linalg.hpp"

namespace gen {

using fockop::CMatrix;
using fockop::Complex;
using fockop::CVector;
using fockop::ExpPoly;
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Uniform in the closed disc of the given radius.
inline Complex disc(Rng& rng, double radius = 1.0) {
  const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
  const double t = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return std::polar(r, t);
}

inline CVector vec(Rng& rng, std::size_t n, double radius) {
  CVector v(n);
  for (auto& x : v) x = disc(rng, radius / std::sqrt(static_cast<double>(n)));
  return v;
}

inline CVector unit(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (auto& x : v) x = Complex(g(rng), g(rng));
  const double r = fockop::norm(v);
  for (auto& x : v) x /= r;
  return v;
}

inline CMatrix matrix(Rng& rng, std::size_t n, double radius = 1.0) {
  CMatrix a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = disc(rng, radius);
  return a;
}

// Haar-ish unitary from Gram-Schmidt on a Gaussian matrix.
inline CMatrix unitary(Rng& rng, std::size_t n) {
  std::vector<CVector> cols;
  while (cols.size() < n) {
    CVector v = unit(rng, n);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& c : cols) {
        const Complex d = fockop::inner(v, c);
        for (std::size_t i = 0; i < n; ++i) v[i] -= d * c[i];
      }
    const double r = fockop::norm(v);
    if (r < 1e-6) continue;
    for (auto& x : v) x /= r;
    cols.push_back(v);
  }
  CMatrix u(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) u(i, j) = cols[j][i];
  return u;
}

// V diag(sigma) U with random unitaries.
inline CMatrix with_singular_values(Rng& rng, const std::vector<double>& sigma) {
  const std::size_t n = sigma.size();
  return unitary(rng, n) * CMatrix::diagonal(std::span<const double>(sigma)) * unitary(rng, n);
}

struct PolyShape {
  int terms = 3;
  int max_degree = 2;
  double freq_radius = 1.0;
  double coeff_radius = 1.0;
  bool common_frequency = false;
};

inline ExpPoly exppoly(Rng& rng, std::size_t n, const PolyShape& shape) {
  std::vector<fockop::Term> terms;
  const CVector shared = vec(rng, n, shape.freq_radius);
  const int count = uniform_int(rng, 1, shape.terms);
  for (int k = 0; k < count; ++k) {
    fockop::Term t;
    t.coeff = disc(rng, shape.coeff_radius);
    if (std::abs(t.coeff) < 0.05) t.coeff = 0.5;
    int budget = uniform_int(rng, 0, shape.max_degree);
    t.power.assign(n, 0);
    while (budget-- > 0) ++t.power[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n) - 1))];
    t.freq = shape.common_frequency ? shared : vec(rng, n, shape.freq_radius);
    terms.push_back(std::move(t));
  }
  return ExpPoly(n, std::move(terms));
}

inline fockop::AffineMap affine(Rng& rng, std::size_t n, double matrix_radius, double shift_radius) {
  return fockop::AffineMap(matrix(rng, n, matrix_radius), vec(rng, n, shift_radius));
}

// Relative closeness with an absolute floor.
inline bool close(double x, double y, double rel, double abs_floor = 0.0) {
  return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)) + abs_floor;
}

inline bool close(Complex x, Complex y, double rel, double abs_floor = 0.0) {
  return std::abs(x - y) <= rel * std::max(std::abs(x), std::abs(y)) + abs_floor;
}

}  // namespace gen
