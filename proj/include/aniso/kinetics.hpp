#pragma once

#include <cmath>
#include <limits>

#include "aniso/network.hpp"

namespace aniso {

using CountVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

/// Rates of every directed reaction, flat-indexed: pair p forward at p,
/// backward at p + n_pairs().
struct RateVector {
  Vector values;
  double value(const Network& net, Direction d) const {
    return values(d.pair + (d.backward ? net.n_pairs() : 0));
  }
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Mass-action factor B_r(rho) = prod_x rho_x^alpha_x, with 0^0 = 1.
inline double mass_action(const Network& net, const Vector& rho, Direction d) {
  const Eigen::VectorXi& a = net.alpha(d);
  double b = 1.0;
  for (Eigen::Index x = 0; x < a.size(); ++x)
    for (int i = 0; i < a(x); ++i) b *= rho(x);
  return b;
}

/// Arrhenius factor theta^q exp(-(a_r - e.alpha^r)/(k_B theta)), extended
/// continuously to theta = 0.
inline double arrhenius(const Network& net, double theta, Direction d) {
  if (theta < 0.0) throw negative_temperature_error("arrhenius: negative temperature");
  const double q = net.arrhenius_exponent();
  const double b = net.barrier(d);
  if (theta == 0.0) {
    if (b > 0.0) return 0.0;
    if (b < 0.0) return kInf;
    // zero barrier: limit of theta^q
    if (q > 0.0) return 0.0;
    if (q == 0.0) return 1.0;
    return kInf;
  }
  return std::pow(theta, q) * std::exp(-b / (net.boltzmann_constant() * theta));
}

/// Macroscopic reaction rate k_r(rho, theta) = kappa_r A_r(theta) B_r(rho).
inline double rate(const Network& net, const State& s, Direction d) {
  const double kappa = net.kappa(d);
  if (kappa == 0.0) return 0.0;
  const double b = mass_action(net, s.rho, d);
  if (b == 0.0) return 0.0;
  return kappa * arrhenius(net, s.theta, d) * b;
}

/// Rate at the temperature determined by total energy E0.
inline double rate_energy_closed(const Network& net, const Vector& rho, double E0, Direction d) {
  return rate(net, State{rho, temperature_from_energy(net, rho, E0)}, d);
}

/// All 2R directed rates at a state, forward block first.
inline RateVector directed_rates(const Network& net, const State& s) {
  RateVector rv;
  rv.values.resize(net.n_directions());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    rv.values(p) = rate(net, s, fwd(p));
    rv.values(p + net.n_pairs()) = rate(net, s, rev(p));
  }
  return rv;
}

inline RateVector directed_rates_closed(const Network& net, const Vector& rho, double E0) {
  return directed_rates(net, State{rho, temperature_from_energy(net, rho, E0)});
}

/// Microscopic jump rate k_r^(V): combinatorial mass action
/// with the negative-concentration and negative-temperature indicators.
/// The returned value is per unit volume; the process jumps at V * k_r^(V).
inline double micro_rate(const Network& net, const CountVector& counts, double theta, long long V,
                         Direction d) {
  const double kappa = net.kappa(d);
  if (kappa == 0.0) return 0.0;
  const Eigen::VectorXi& a = net.alpha(d);
  // 1{n >= alpha}, and falling-factorial product n!/(n-alpha)! / V^|alpha|_1,
  // accumulated multiplicatively to avoid large factorials.
  double b = 1.0;
  for (Eigen::Index x = 0; x < a.size(); ++x) {
    if (counts(x) < a(x)) return 0.0;
    for (int i = 0; i < a(x); ++i) b *= static_cast<double>(counts(x) - i) / static_cast<double>(V);
  }
  // 1{V c_H theta >= e . gamma^r}: the jump may not push temperature below zero.
  if (static_cast<double>(V) * net.heat_capacity() * theta < net.gamma_energy(d)) return 0.0;
  return kappa * arrhenius(net, theta, d) * b;
}

/// Instantaneous net reaction flux J0_r = k_r - k_bw(r) per forward pair.
inline Vector net_flux(const Network& net, const State& s) {
  Vector j(net.n_pairs());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
    j(p) = rate(net, s, fwd(p)) - rate(net, s, rev(p));
  return j;
}

}  // namespace aniso
