#pragma once

#include <cmath>
#include <vector>

#include "aniso/kinetics.hpp"
#include "aniso/micro_sim.hpp"
#include "aniso/network.hpp"
#include "aniso/quasipotential.hpp"

namespace aniso {

/// Exact invariant measure of the temperature-coupled A<=>B birth-death chain,
/// factorised into chemical (Poisson-product) and thermal log-factors:
/// log Pi[i] = log_chemical[i] + log_thermal[i] - log_normalization.
struct BirthDeathMeasure {
  long long V = 0;
  long long i_minus = 0;  // particle count of the forward reactant species
  long long i_plus = 0;
  Eigen::Index species_a = 0;  // index of the counted species (forward reactant)
  Vector probabilities;        // indexed by i - i_minus
  Vector log_chemical;         // log G^(V)
  Vector log_thermal;          // log F^(V)
  double log_normalization = 0.0;
  double normalization = 0.0;

  double probability(long long i) const {
    if (i < i_minus || i > i_plus) return 0.0;
    return probabilities(i - i_minus);
  }
};

namespace detail {

struct UnimolecularShape {
  Eigen::Index a = 0;  // forward reactant species
  Eigen::Index b = 0;  // forward product species
};

inline UnimolecularShape require_unimolecular(const Network& net) {
  if (net.n_species() != 2 || net.n_pairs() != 1)
    throw topology_error("operation requires exactly the network A<=>B");
  const Eigen::VectorXi& af = net.alpha(fwd(0));
  const Eigen::VectorXi& ab = net.alpha(rev(0));
  if (af.sum() != 1 || ab.sum() != 1 || af.maxCoeff() != 1 || ab.maxCoeff() != 1 ||
      af == ab)
    throw topology_error("operation requires exactly the network A<=>B");
  net.require_reversible("unimolecular invariant measure");
  UnimolecularShape sh;
  sh.a = af(0) == 1 ? 0 : 1;
  sh.b = 1 - sh.a;
  return sh;
}

}  // namespace detail

/// Build the invariant measure at volume V and micro total energy E0V. The
/// state space is {i : 0 <= i <= V, theta[i] >= 0} with i the count of the
/// forward reactant; the measure is assembled from the closed-form factor
/// products (all in log space) and normalised.
inline BirthDeathMeasure exact_invariant(const Network& net, long long V, double E0V) {
  const auto sh = detail::require_unimolecular(net);
  const double cH = net.heat_capacity();
  const double kB = net.boltzmann_constant();
  const double eA = net.energies()(sh.a);
  const double eB = net.energies()(sh.b);
  const double a_fw = net.barrier(fwd(0)) + eA;  // transition energy
  const double q = net.arrhenius_exponent();

  auto theta_of = [&](long long i) {
    return (E0V - (eA * static_cast<double>(i) + eB * static_cast<double>(V - i)) /
                      static_cast<double>(V)) /
           cH;
  };

  long long i_minus = -1, i_plus = -1;
  for (long long i = 0; i <= V; ++i) {
    if (theta_of(i) >= 0.0) {
      if (i_minus < 0) i_minus = i;
      i_plus = i;
    } else if (i_minus >= 0) {
      break;  // theta is affine in i, the admissible range is contiguous
    }
  }
  if (i_minus < 0) throw infeasible_error("exact_invariant: no admissible particle count");

  const long long n = i_plus - i_minus + 1;
  // pi proportional to (kappa_bw, kappa_fw), normalised to the unit total mass
  // of the class; the chemical factor only uses the detailed-balance ratio, so
  // the normalisation is absorbed by Z.
  const double kf = net.kappa(fwd(0));
  const double kb = net.kappa(rev(0));
  const double pi_a = kb / (kf + kb);
  const double pi_b = kf / (kf + kb);

  BirthDeathMeasure m;
  m.V = V;
  m.i_minus = i_minus;
  m.i_plus = i_plus;
  m.species_a = sh.a;
  m.log_chemical.resize(n);
  m.log_thermal.resize(n);

  for (long long i = i_minus; i <= i_plus; ++i) {
    const double na = static_cast<double>(i);
    const double nb = static_cast<double>(V - i);
    m.log_chemical(i - i_minus) = na * std::log(static_cast<double>(V) * pi_a) -
                                  std::lgamma(na + 1.0) +
                                  nb * std::log(static_cast<double>(V) * pi_b) -
                                  std::lgamma(nb + 1.0) - static_cast<double>(V);
  }

  // Thermal factor: the telescoped Arrhenius-ratio product, including the
  // theta^q ratio the prefactors leave behind.
  const double th_min = theta_of(i_minus);
  double interior_sum = 0.0;  // running sum of (e_B - e_A)/(k_B theta[l]), l = i_minus+1 .. i-1
  for (long long i = i_minus; i <= i_plus; ++i) {
    double lf = 0.0;
    if (i > i_minus) {
      const double th_i = theta_of(i);
      lf = -(a_fw - eB) / (kB * th_min) + (a_fw - eA) / (kB * th_i) +
           q * (std::log(th_min) - std::log(th_i)) + interior_sum;
      interior_sum += (eB - eA) / (kB * th_i);
    }
    m.log_thermal(i - i_minus) = lf;
  }

  Vector logp = m.log_chemical + m.log_thermal;
  const double shift = logp.maxCoeff();
  m.log_normalization = shift + std::log((logp.array() - shift).exp().sum());
  m.normalization = std::exp(m.log_normalization);
  m.probabilities = (logp.array() - m.log_normalization).exp();
  return m;
}

/// Max relative detailed-balance defect of a measure against the micro rates:
/// max_i |Pi[i-1] k_bw(i-1) - Pi[i] k_fw(i)| relative to the larger flow.
inline double db_check(const BirthDeathMeasure& m, const Network& net, long long V, double E0V) {
  const auto sh = detail::require_unimolecular(net);
  const double cH = net.heat_capacity();
  auto theta_of = [&](long long i) {
    return (E0V - (net.energies()(sh.a) * static_cast<double>(i) +
                   net.energies()(sh.b) * static_cast<double>(V - i)) /
                      static_cast<double>(V)) /
           cH;
  };
  auto counts_of = [&](long long i) {
    CountVector c(2);
    c(sh.a) = i;
    c(sh.b) = V - i;
    return c;
  };
  double worst = 0.0;
  for (long long i = m.i_minus + 1; i <= m.i_plus; ++i) {
    const double flow_up =
        m.probability(i - 1) * micro_rate(net, counts_of(i - 1), theta_of(i - 1), V, rev(0));
    const double flow_down =
        m.probability(i) * micro_rate(net, counts_of(i), theta_of(i), V, fwd(0));
    const double scale = std::max({flow_up, flow_down, 1e-300});
    worst = std::max(worst, std::abs(flow_up - flow_down) / scale);
  }
  return worst;
}

/// One row of the LDP rate-convergence table of the unimolecular measure.
struct RateConvergenceRow {
  long long V = 0;
  double finite_rate = 0.0;  // -(1/V) log Pi^(V)(rho[i_V])
  double limit = 0.0;        // S(rho|pi) - (c_H/k_B) log(theta/theta_minus), matched at the argmin
  double deviation = 0.0;
};

/// Compare the finite-V decay rate of the exact invariant measure against the
/// analytic large-deviation limit, both normalised to vanish at their minima.
inline std::vector<RateConvergenceRow> ldp_rate_convergence(const Network& net, const Vector& rho0,
                                                            double theta0,
                                                            const std::vector<long long>& Vs,
                                                            double rho_a_target) {
  const auto sh = detail::require_unimolecular(net);
  const double mass = rho0.sum();
  const double kf = net.kappa(fwd(0));
  const double kb = net.kappa(rev(0));
  Vector pi(2);
  pi(sh.a) = mass * kb / (kf + kb);
  pi(sh.b) = mass * kf / (kf + kb);
  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  const auto [theta_min, theta_max] = temperature_bounds(net, rho0, theta0);

  auto limit_raw = [&](double rho_a) {
    Vector rho(2);
    rho(sh.a) = rho_a;
    rho(sh.b) = mass - rho_a;
    const double theta = (E0 - net.energies().dot(rho)) / net.heat_capacity();
    if (!(theta > 0.0)) return kInf;
    return relative_entropy(rho, pi) -
           net.heat_capacity() / net.boltzmann_constant() * std::log(theta / theta_min);
  };
  // Golden-section minimum of the limit over the admissible segment.
  double lo = 0.0, hi = mass;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = limit_raw(x1), f2 = limit_raw(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = limit_raw(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = limit_raw(x2);
    }
  }
  const double limit_min = std::min(f1, f2);

  std::vector<RateConvergenceRow> rows;
  for (long long V : Vs) {
    const long long i_target = std::llround(rho_a_target * static_cast<double>(V) / mass);
    CountVector counts0(2);
    counts0(sh.a) = std::llround(rho0(sh.a) * static_cast<double>(V));
    counts0(sh.b) = V - counts0(sh.a);
    const double E0V =
        net.energies().dot(counts0.cast<double>()) / static_cast<double>(V) +
        net.heat_capacity() * theta0;
    const BirthDeathMeasure m = exact_invariant(net, V, E0V);
    if (i_target < m.i_minus || i_target > m.i_plus)
      throw semantic_error("ldp_rate_convergence: target lies outside the admissible counts");
    RateConvergenceRow row;
    row.V = V;
    row.finite_rate = -(m.log_chemical(i_target - m.i_minus) +
                        m.log_thermal(i_target - m.i_minus) - m.log_normalization) /
                      static_cast<double>(V);
    row.limit = limit_raw(rho_a_target) - limit_min;
    row.deviation = std::abs(row.finite_rate - row.limit);
    rows.push_back(row);
  }
  return rows;
}

/// CSV table `V,rate,limit,deviation`.
inline std::string rate_convergence_csv(const std::vector<RateConvergenceRow>& rows) {
  std::string out = "V,rate,limit,deviation\n";
  for (const auto& r : rows) {
    out += std::to_string(r.V) + "," + io::format_double(r.finite_rate) + "," +
           io::format_double(r.limit) + "," + io::format_double(r.deviation) + "\n";
  }
  return out;
}

}  // namespace aniso
