#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fockop/funcspace.hpp"
#include "fockop/linalg.hpp"
#include "fockop/quad.hpp"

namespace fockop {

/// W f = psi * (f o phi) from F^p(C^n) to F^q(C^n).
struct WcoProblem {
  ExpPoly psi;
  AffineMap phi;
  double p = 2.0;
  double q = 2.0;
  QuadSpec quad;

  std::size_t dim() const { return phi.dim(); }
  /// Throws DimensionError / DomainError on inconsistent or out-of-range data.
  void validate() const;
};

inline constexpr double kAdmissibilityTol = 1e-10;

enum class Admissibility { admissible, inadmissible_norm_gt_1 };

Admissibility admissibility(const WcoProblem& problem, double tol = kAdmissibilityTol);

/// psi_t(z) = psi(U^* z), phi_t(z) = diag(A_t) z + b_t with b_t = V^* b,
/// so that W_{psi,phi} = C_U W_{psi_t,phi_t} C_V.
struct Normalization {
  ExpPoly psi_t;
  std::vector<double> A_t;
  CVector b_t;
  CMatrix U;
  CMatrix V;
  int rank_s = 0;
  std::vector<double> sigma_raw;

  std::size_t dim() const { return A_t.size(); }
  AffineMap phi_t() const;
};

Normalization normalize(const WcoProblem& problem);
Normalization normalize(const ExpPoly& psi, const AffineMap& phi);
/// Normalization from a caller-supplied factorization A = V diag(sigma) U.
/// Throws DomainError if the factors do not reproduce A within 1e-9 or are
/// not unitary, or if sigma is not non-increasing.
Normalization normalize_with(const ExpPoly& psi, const AffineMap& phi, const SvdTriple& factors);

/// m_z = |psi(z)| e^{(|phi(z)|^2 - |z|^2)/2}.
double m_at(const ExpPoly& psi, const AffineMap& phi, std::span<const Complex> z);

enum class ProfileMode { certified_single_freq, numeric };

std::string to_string(ProfileMode m);

struct CoordinateData {
  double a = 0.0;
  Complex w = 0.0;
  int deg = 0;
};

/// The slice profile l_{z[s]} of a normalized pair. In certified mode
/// psi_t = P e^{<z, c>} and
///   log l = sum_{i<s} [((a_i^2 - 1)/2)|z_i|^2 + Re(z_i conj(w_i))] + log(C * Q(z_[s]))
/// with w_i = c_i + a_i b_i. For pure exponentials Q = 1 and C is exact.
struct EllProfile {
  int s = 0;
  std::size_t n = 0;
  double q = 2.0;
  std::vector<CoordinateData> coords;
  double constant_factor = 0.0;
  ProfileMode mode = ProfileMode::numeric;
  bool pure_exponential = false;

  ExpPoly psi_t;
  std::vector<double> a;
  CVector b_t;
  /// psi_t with the head components of its frequency removed (certified mode).
  ExpPoly residual;
  QuadSpec quad;
};

/// Throws DomainError when rank_s == 0.
EllProfile ell_profile(const Normalization& norm, double q, const QuadSpec& spec = {});
/// The same profile taken over all n coordinates, i.e. m_z(psi_t, phi_t).
EllProfile m_profile(const Normalization& norm, const QuadSpec& spec = {});

double log_ell_at(const EllProfile& profile, std::span<const Complex> z_head);
double ell_at(const EllProfile& profile, std::span<const Complex> z_head);

struct EllSup {
  bool finite = true;
  double value = 0.0;
  NormMode mode = NormMode::closed_form;
  CVector argmax;
  std::string reason;
};

EllSup ell_sup(const EllProfile& profile);

/// Closed-form limsup as |z_head| -> infinity; DomainError unless the profile
/// is certified with finite sup.
double ell_limsup(const EllProfile& profile);

/// Sup over C^n of m_z(psi, phi), computed in normalized coordinates.
EllSup m_sup(const ExpPoly& psi, const AffineMap& phi, const QuadSpec& spec = {});

enum class Verdict { unbounded, bounded_not_compact, compact };
enum class ClassMode { certified, numeric_evidence };

std::string to_string(Verdict v);
std::string to_string(ClassMode m);

/// log l sampled along a ray t * direction.
struct RaySample {
  CVector direction;
  std::vector<double> radii;
  std::vector<double> log_ell;
};

struct Classification {
  Verdict verdict = Verdict::unbounded;
  ClassMode mode = ClassMode::certified;
  std::string certificate;
  std::vector<RaySample> evidence;

  bool bounded() const { return verdict != Verdict::unbounded; }
};

Classification classify(const WcoProblem& problem);

/// Purely algebraic verdict for C_phi (psi = 1).
Classification composition_criterion(const AffineMap& phi, double p, double q);

enum class BoundMode { closed_form, numeric };
std::string to_string(BoundMode m);

struct NormBounds {
  double lower = 0.0;
  double upper = 0.0;
  BoundMode mode = BoundMode::closed_form;
  bool upper_is_up_to_universal_constant = false;
  std::optional<double> essential_lower;
  std::optional<double> essential_upper;
};

/// DomainError for unbounded problems.
NormBounds norm_bounds(const WcoProblem& problem);
/// UnsupportedError unless 1 < p <= q < infinity; DomainError if unbounded.
NormBounds essential_norm_bounds(const WcoProblem& problem);

/// Directions used for ray scans of l on C^s: coordinate axes followed by
/// `extra` fixed-seed random unit vectors.
std::vector<CVector> ray_directions(std::size_t s, int extra, std::uint64_t seed);

std::vector<RaySample> scan_rays(const EllProfile& profile, const std::vector<double>& radii,
                                 const std::vector<CVector>& directions);

/// Growth/decay summary of log l on radii {0,1,2,4,8,16} along the axes and
/// 8 seeded directions.
struct RayVerdict {
  bool grows = false;
  bool decays = true;
  double tail_max = 0.0;
  std::vector<RaySample> rays;
};

RayVerdict ray_verdict(const EllProfile& profile);

}  // namespace fockop
