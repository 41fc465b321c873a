#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fockop/funcspace.hpp"
#include "fockop/quad.hpp"
#include "fockop/wco.hpp"

namespace fockop {

inline constexpr std::size_t kMaxBasis = 5000;

struct TruncationSpec {
  int max_degree = 12;
  QuadSpec quad;
};

/// Multi-indices with |alpha| <= degree, graded then lexicographic.
std::vector<MultiIndex> monomial_basis(std::size_t n, int degree);

/// Entry (beta, alpha) = <W e_alpha, e_beta> in F^2 for the orthonormal
/// monomials e_alpha = z^alpha / sqrt(alpha!). Requires p = q = 2.
Eigen::MatrixXcd f2_matrix(const WcoProblem& problem, const TruncationSpec& spec);

/// Rows |beta| <= row_degree, columns |alpha| in [col_min, col_max].
Eigen::MatrixXcd f2_block(const WcoProblem& problem, int row_degree, int col_min, int col_max);

double truncated_norm(const Eigen::MatrixXcd& m);

/// Estimate of ||W (I - P_N)|| from the block with columns N < |alpha| <= N + extra
/// (extra = 0 means 8).
double truncated_essential_upper(const WcoProblem& problem, int max_degree, const QuadSpec& spec = {},
                                 int extra = 0);

struct FamilySpec {
  std::vector<double> radii{0.0, 1.0, 2.0, 4.0, 8.0};
  int extra_directions = 8;
  std::uint64_t seed = 20240611;
  int monomial_degree = 4;
  /// Also test k_{phi(z)} at these points of C^n.
  std::vector<CVector> phi_points;
};

struct RayleighSample {
  std::string descriptor;
  double quotient = 0.0;
  double err_estimate = 0.0;
};

/// ||W f||_q / ||f||_p over normalized kernels on rays, monomials, and
/// kernels at phi(z).
std::vector<RayleighSample> rayleigh_sweep(const WcoProblem& problem, const FamilySpec& family);

/// W k_w as an exp-poly.
ExpPoly apply_to_kernel(const WcoProblem& problem, std::span<const Complex> w);

struct WitnessTable {
  std::vector<double> radii;
  std::vector<CVector> directions;
  /// values[d][r] = ||W k_{radii[r] directions[d]}||_q.
  std::vector<std::vector<double>> values;
  bool monotone_decay = false;
};

WitnessTable compactness_witness(const WcoProblem& problem, const std::vector<double>& radii,
                                 const std::vector<CVector>& directions);

}  // namespace fockop
