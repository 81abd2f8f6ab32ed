#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "aniso/kinetics.hpp"
#include "aniso/network.hpp"

namespace aniso {

/// A boundary-escape question: can the process leave rho_bd along the inward
/// ray rho_bd + tau g through the given reaction at finite large-deviation cost?
struct BoundaryQuery {
  Vector boundary_point;
  Vector direction;            // inward-pointing, nonzero
  Direction reaction{0, false};
  std::vector<double> tau_grid = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
};

namespace detail {

inline double neg_log_rate_on_ray(const Network& net, double E0, const BoundaryQuery& q,
                                  double tau) {
  const Vector rho = q.boundary_point + tau * q.direction;
  if ((rho.array() < 0.0).any()) return kInf;
  const double theta = (E0 - net.energies().dot(rho)) / net.heat_capacity();
  if (theta < 0.0) return kInf;
  const double k = rate(net, State{rho, theta}, q.reaction);
  if (k <= 0.0) return kInf;
  return -std::log(k);
}

}  // namespace detail

/// Escape integral -int_0^tau log k_r(rho_bd + s g) ds by dyadic quadrature
/// toward the singular endpoint; +inf when the integral diverges there (the
/// dyadic increments then fail to decay).
inline double escape_integral(const Network& net, double E0, const BoundaryQuery& q, double tau) {
  if (!(tau > 0.0)) throw semantic_error("escape_integral: tau must be positive");
  if (q.direction.lpNorm<Eigen::Infinity>() == 0.0)
    throw semantic_error("escape_integral: direction must be nonzero");

  // 5-point Gauss-Legendre nodes/weights on (0, 1).
  static const double nodes[5] = {0.046910077030668, 0.230765344947158, 0.5,
                                  0.769234655052841, 0.953089922969332};
  static const double weights[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                                    0.239314335249683, 0.118463442528095};

  constexpr int kMaxLevels = 56;
  double total = 0.0;
  double last_increment = kInf;
  for (int m = 0; m < kMaxLevels; ++m) {
    const double b = tau * std::ldexp(1.0, -m);
    const double a = 0.5 * b;
    double inc = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double f = detail::neg_log_rate_on_ray(net, E0, q, a + (b - a) * nodes[i]);
      if (f == kInf) return kInf;
      inc += weights[i] * f;
    }
    inc *= (b - a);
    total += inc;
    if (std::abs(inc) <= 1e-14 * (1.0 + std::abs(total)) &&
        std::abs(last_increment) <= 1e-14 * (1.0 + std::abs(total)))
      return total;
    last_increment = inc;
  }
  // Increments never became negligible: the integrand is not integrable at 0
  // (a 1/s-type singularity gives constant increments per dyadic level).
  return kInf;
}

enum class BoundaryVerdict { escapable, trapped };

inline const char* to_string(BoundaryVerdict v) {
  return v == BoundaryVerdict::escapable ? "escapable" : "trapped";
}

/// Classify a boundary point by the trend of the escape integral over the tau
/// grid: values tending to 0 (tau or tau|log tau| template) mean escapable,
/// divergence (any +inf, or a 1/tau trend) means trapped. An ambiguous trend
/// raises inconclusive_error rather than guessing.
inline BoundaryVerdict classify_boundary(const Network& net, double E0, const BoundaryQuery& q) {
  std::vector<double> taus = q.tau_grid;
  if (taus.empty()) throw semantic_error("classify_boundary: empty tau grid");
  std::vector<double> vals(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    vals[i] = escape_integral(net, E0, q, taus[i]);
    if (vals[i] == kInf) return BoundaryVerdict::trapped;
  }

  // Least-squares fit v ~ c * T(tau) for each template, judged by R^2.
  auto fit_r2 = [&](auto&& T) {
    double num = 0.0, den = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      num += vals[i] * T(taus[i]);
      den += T(taus[i]) * T(taus[i]);
      mean += vals[i];
    }
    mean /= static_cast<double>(taus.size());
    const double c = den > 0.0 ? num / den : 0.0;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      ss_res += (vals[i] - c * T(taus[i])) * (vals[i] - c * T(taus[i]));
      ss_tot += (vals[i] - mean) * (vals[i] - mean);
    }
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  };

  const double r2_linear = fit_r2([](double t) { return t; });
  const double r2_loglinear = fit_r2([](double t) { return t * std::abs(std::log(t)); });
  const double r2_inverse = fit_r2([](double t) { return 1.0 / t; });

  const double best = std::max({r2_linear, r2_loglinear, r2_inverse});
  if (best < 0.99)
    throw inconclusive_error("classify_boundary: no template fits the escape-integral trend "
                             "(best R^2 = " +
                             std::to_string(best) + ")");
  if (best == r2_inverse) return BoundaryVerdict::trapped;
  return BoundaryVerdict::escapable;
}

/// Hypotheses required by the pathwise LDP: bounded attainable set and
/// strictly positive minimal temperature.
struct HypothesisReport {
  bool bounded = false;
  double theta_minus = 0.0;
  double theta_plus = 0.0;
  bool theta_positive = false;
  bool ok = false;
  std::string detail;
};

inline HypothesisReport hypothesis_check(const Network& net, const Vector& rho0, double theta0) {
  HypothesisReport rep;
  try {
    const auto [tmin, tmax] = temperature_bounds(net, rho0, theta0);
    rep.bounded = true;
    rep.theta_minus = tmin;
    rep.theta_plus = tmax;
    rep.theta_positive = tmin > 0.0;
  } catch (const unbounded_simplex_error& e) {
    rep.bounded = false;
    rep.detail = e.what();
  }
  rep.ok = rep.bounded && rep.theta_positive;
  if (rep.ok) rep.detail = "LDP hypotheses satisfied";
  else if (rep.bounded) rep.detail = "theta_minus = 0: zero temperature attainable";
  return rep;
}

}  // namespace aniso
