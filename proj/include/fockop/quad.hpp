#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fockop/funcspace.hpp"

namespace fockop {

enum class QuadMethod { gauss_hermite, monte_carlo };

/// Numerical settings shared by every integral and sup search. Zero in
/// nodes_per_axis, sup_radius or sup_grid means "choose from the input";
/// resolved() fills those in for a given dimension.
struct QuadSpec {
  QuadMethod method = QuadMethod::gauss_hermite;
  int nodes_per_axis = 0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 20240611;
  double sup_radius = 0.0;
  int sup_grid = 0;
  int refine_iters = 400;
  bool allow_closed_form = true;

  QuadSpec resolved(std::size_t n) const;
};

int default_nodes(std::size_t n);
int default_sup_grid(std::size_t n);

enum class NormMode { closed_form, quadrature, monte_carlo, sup_search };

std::string to_string(QuadMethod m);
std::string to_string(NormMode m);

struct NormResult {
  double value = 0.0;
  NormMode mode = NormMode::closed_form;
  double err_estimate = 0.0;
  /// Sup searches: radius beyond which the objective provably stays below value.
  double search_radius = 0.0;
  CVector argmax;
};

/// One-dimensional rule: sum_k w_k g(x_k).
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Hermite rule for weight e^{-x^2} on R.
const Rule& gauss_hermite(int nodes);
/// Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int nodes);

/// ((p/2pi)^n int |f|^p e^{-p|z|^2/2} dA)^{1/p}. Throws DomainError unless
/// 0 < p < infinity.
NormResult fock_norm(const ExpPoly& f, double p, const QuadSpec& spec = {});

/// sup_z |f(z)| e^{-|z|^2/2}; a certified lower bound from grid search plus
/// local refinement, with the analytic tail radius recorded.
NormResult fock_sup_norm(const ExpPoly& f, const QuadSpec& spec = {});

/// ||psi(head, .)||_{n-s,q}, with the convention |psi(head)| when s = n.
NormResult slice_norm(const ExpPoly& psi, double q, std::span<const Complex> head,
                      const QuadSpec& spec = {});

/// Maximizes a log-scale objective over C^dim. Grid over the box of the
/// given radius, then Nelder-Mead from the best grid points and the seeds.
struct SupSearch {
  double log_value = 0.0;
  CVector argmax;
};

SupSearch maximize_log(const std::function<double(std::span<const Complex>)>& objective,
                       std::size_t dim, double radius, int grid, int refine_iters,
                       const std::vector<CVector>& seeds);

/// Radius beyond which |f(z)| e^{-|z|^2/2} < e^{log_level}.
double tail_radius(const ExpPoly& f, double log_level);

}  // namespace fockop
