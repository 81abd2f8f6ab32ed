#pragma once

#include <cmath>

#include "aniso/kinetics.hpp"

namespace aniso {

/// Legendre dual of cosh: cosh*(s) = s asinh(s) - sqrt(1+s^2), with a series
/// branch near 0 to avoid cancellation (cosh*(s) + 1 = s^2/2 - s^4/24 + ...).
inline double cosh_star(double s) {
  const double a = std::abs(s);
  if (a < 1e-4) return -1.0 + s * s * 0.5 - s * s * s * s / 24.0;
  return s * std::asinh(s) - std::sqrt(1.0 + s * s);
}

namespace detail {

/// One-pair dissipation potential Psi with prefactor sigma = sqrt(k_f k_b).
inline double pair_psi(double sigma, double j) {
  if (sigma <= 0.0) return j == 0.0 ? 0.0 : kInf;
  return 2.0 * sigma * (cosh_star(j / (2.0 * sigma)) + 1.0);
}

/// One-pair dual dissipation potential Psi*.
inline double pair_psi_star(double sigma, double zeta) {
  return 2.0 * sigma * (std::cosh(zeta) - 1.0);
}

/// dPsi/dj for one pair: the conjugate force of a flux.
inline double pair_psi_slope(double sigma, double j) { return std::asinh(j / (2.0 * sigma)); }

}  // namespace detail

}  // namespace aniso
