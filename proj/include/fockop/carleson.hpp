#pragma once

#include <optional>
#include <span>
#include <string>

#include "fockop/quad.hpp"
#include "fockop/wco.hpp"

namespace fockop {

enum class CarlesonMode { closed_form, quadrature };

std::string to_string(CarlesonMode m);

/// ||l||_{L^r(C^s, dA)} with r = pq/(p - q); lr_norm is empty when l is not
/// in L^r.
struct CarlesonReport {
  double r_exponent = 0.0;
  std::optional<NormResult> lr_norm;
  bool member = false;
  CarlesonMode mode = CarlesonMode::closed_form;
};

/// Requires 0 < q < p < infinity and rank_s >= 1 (DomainError otherwise).
CarlesonReport carleson_integral(const Normalization& norm, double p, double q, const QuadSpec& spec = {});

/// The same L^r norm from l evaluated by its definition, integrated by
/// Gauss-Hermite around the numerical maximizer. DomainError unless every
/// a_i < 1.
NormResult lr_quadrature(const Normalization& norm, double p, double q, const QuadSpec& spec = {});

/// mu(B(center, radius)) for the pull-back measure
/// (q/2pi)^s int_{phi_[s]^{-1}(B)} ||psi(z_[s], .)||^q e^{-q|z_[s]|^2/2} dA.
double pullback_mass(const Normalization& norm, double q, std::span<const Complex> center, double radius,
                     const QuadSpec& spec = {});

/// ||psi_t (k_w o phi_t[s])||_{n,q}^q, an exact-class Fock norm.
NormResult berezin_transform(const Normalization& norm, double q, std::span<const Complex> w_head,
                             const QuadSpec& spec = {});

/// The same transform by direct Gauss-Legendre integration of the measure
/// integral over a box. Requires rank_s == n.
NormResult berezin_measure_integral(const Normalization& norm, double q, std::span<const Complex> w_head,
                                    const QuadSpec& spec = {});

}  // namespace fockop
