#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "aniso/dissipation.hpp"
#include "aniso/kinetics.hpp"
#include "aniso/quasipotential.hpp"
#include "aniso/trajectory.hpp"

namespace aniso {

/// Integrated path cost with its per-interval integrand record;
/// total = sum_i per_interval[i].second * (t_{i+1} - t_i).
struct PathCost {
  double total = 0.0;
  std::vector<std::pair<double, double>> per_interval;  // (t_i, mean integrand on interval i)
};

namespace detail {

/// Per-pair net-flux cost: contraction of s(.|k_f) + s(.|k_b) over one-way
/// fluxes with difference j. KKT gives jf * jb = k_f k_b, solved in the stable
/// root form; one-sided closed forms when a rate vanishes.
inline double pair_flux_cost(double k_f, double k_b, double j) {
  if (k_f <= 0.0 && k_b <= 0.0) return j == 0.0 ? 0.0 : kInf;
  if (k_b <= 0.0) return j >= 0.0 ? boltzmann_s(j, k_f) : kInf;
  if (k_f <= 0.0) return j <= 0.0 ? boltzmann_s(-j, k_b) : kInf;
  const double root = std::hypot(j, 2.0 * std::sqrt(k_f * k_b));
  double jf, jb;
  if (j >= 0.0) {
    jf = 0.5 * (j + root);
    jb = k_f * k_b / jf;
  } else {
    jb = 0.5 * (root - j);
    jf = k_f * k_b / jb;
  }
  return boltzmann_s(jf, k_f) + boltzmann_s(jb, k_b);
}

}  // namespace detail

/// Flux Lagrangian L(rho, j): sum of per-pair contracted one-way costs at the
/// energy-closed rates. The network must be structurally reversible; rates may
/// still vanish at boundary states, handled by the one-sided forms.
inline double flux_lagrangian(const Network& net, const Vector& rho, double E0, const Vector& j) {
  net.require_reversible("flux_lagrangian");
  const RateVector k = directed_rates_closed(net, rho, E0);
  double total = 0.0;
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    const double c = detail::pair_flux_cost(k.values(p), k.values(p + net.n_pairs()), j(p));
    if (c == kInf) return kInf;
    total += c;
  }
  return total;
}

/// Which per-pair dual potential the contraction solver maximises against.
enum class DualKind {
  lagrangian,   // phi(z) = k_f (e^z - 1) + k_b (e^-z - 1); conjugate of L(rho, .)
  dissipation,  // phi(z) = 2 sqrt(k_f k_b) (cosh z - 1);  conjugate of Psi(rho, .)
};

struct DualResult {
  double value = 0.0;
  Vector xi;          // maximiser in concentration space
  Vector optimal_j;   // flux realising the contraction (lagrangian mode)
  bool finite = true;
};

namespace detail {

/// Maximise xi.u - sum_p phi_p(xi . gamma^p) over xi in Ran Gamma by Newton
/// with a regularised Hessian and Armijo backtracking. Returns +inf (finite =
/// false) when u is not attainable: outside Ran Gamma, or requiring flux
/// through a dead channel.
inline DualResult contraction_dual(const Network& net, const RateVector& k, const Vector& u,
                                   DualKind kind, Eigen::Index max_iter = 200) {
  const Eigen::Index P = net.n_pairs();
  const Matrix B = linalg::range_basis(net.gamma_matrix());
  const Eigen::Index d = B.cols();
  DualResult res;

  const double u_norm = u.norm();
  if (linalg::range_distance(net.gamma_matrix(), u) > 1e-9 * (1.0 + u_norm)) {
    res.finite = false;
    res.value = kInf;
    return res;
  }

  const Matrix Gb = net.gamma_matrix().transpose() * B;  // z = Gb zeta per pair
  const Vector ub = B.transpose() * u;

  auto phi = [&](Eigen::Index p, double z, double* dphi, double* ddphi) {
    const double kf = k.values(p);
    const double kb = k.values(p + P);
    if (kind == DualKind::lagrangian) {
      const double ez = std::exp(z);
      const double emz = std::exp(-z);
      if (dphi) *dphi = kf * ez - kb * emz;
      if (ddphi) *ddphi = kf * ez + kb * emz;
      return kf * std::expm1(z) + kb * std::expm1(-z);
    }
    const double sigma = std::sqrt(kf * kb);
    if (dphi) *dphi = 2.0 * sigma * std::sinh(z);
    if (ddphi) *ddphi = 2.0 * sigma * std::cosh(z);
    return 2.0 * sigma * (std::cosh(z) - 1.0);
  };

  Vector zeta = Vector::Zero(d);
  auto objective = [&](const Vector& zt) {
    double g = zt.dot(ub);
    for (Eigen::Index p = 0; p < P; ++p) g -= phi(p, Gb.row(p).dot(zt), nullptr, nullptr);
    return g;
  };
  double g = 0.0;
  const double scale = 1.0 + ub.norm() + k.values.sum();
  double grad_norm = kInf;
  Eigen::Index tail_steps = 0;

  for (Eigen::Index iter = 0; iter < max_iter; ++iter) {
    Vector grad = ub;
    Matrix H = Matrix::Zero(d, d);
    for (Eigen::Index p = 0; p < P; ++p) {
      double dphi, ddphi;
      phi(p, Gb.row(p).dot(zeta), &dphi, &ddphi);
      grad -= dphi * Gb.row(p).transpose();
      H += ddphi * Gb.row(p).transpose() * Gb.row(p);
    }
    grad_norm = grad.lpNorm<Eigen::Infinity>();
    if (grad_norm <= 1e-13 * scale || tail_steps >= 4) break;
    H += 1e-12 * Matrix::Identity(d, d);
    Vector step = H.llt().solve(grad);
    const double slope = grad.dot(step);
    if (slope <= 0.0) break;

    if (slope <= 1e-16 * (1.0 + std::abs(g))) {
      // Quadratic tail: objective improvements sit below roundoff, so take
      // plain Newton steps; they drive the gradient to its floor.
      zeta += step;
      g = objective(zeta);
      ++tail_steps;
      continue;
    }

    double t = 1.0;
    bool moved = false;
    while (t > 1e-16) {
      Vector cand = zeta + t * step;
      const double gc = objective(cand);
      if (std::isfinite(gc) && gc >= g + 1e-4 * t * slope) {
        zeta = std::move(cand);
        g = gc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    if (zeta.norm() > 200.0) {
      // The supremum escapes to infinity: u needs flux through a channel whose
      // rate vanished (possible only on the boundary of the feasible set).
      res.finite = false;
      res.value = kInf;
      return res;
    }
  }
  if (grad_norm > 1e-6 * scale)
    throw convergence_error("contraction dual: Newton did not converge (|grad| = " +
                            std::to_string(grad_norm) + ")");

  res.value = objective(zeta);
  res.xi = B * zeta;
  if (kind == DualKind::lagrangian) {
    res.optimal_j.resize(P);
    for (Eigen::Index p = 0; p < P; ++p) {
      const double z = Gb.row(p).dot(zeta);
      res.optimal_j(p) = k.values(p) * std::exp(z) - k.values(p + P) * std::exp(-z);
    }
  }
  return res;
}

}  // namespace detail

/// State Lagrangian via convex duality, with the maximiser and the optimal
/// contraction flux exposed for reuse.
inline DualResult state_lagrangian_full(const Network& net, const Vector& rho, double E0,
                                        const Vector& u) {
  const RateVector k = directed_rates_closed(net, rho, E0);
  return detail::contraction_dual(net, k, u, DualKind::lagrangian);
}

/// hat L(rho, u) = sup_xi xi.u - H(rho, xi); +inf off Ran Gamma.
inline double state_lagrangian(const Network& net, const Vector& rho, double E0, const Vector& u) {
  return state_lagrangian_full(net, rho, E0, u).value;
}

namespace detail {

template <typename Integrand>
PathCost quadrature_path_cost(const std::vector<double>& times, Integrand&& integrand) {
  PathCost cost;
  cost.per_interval.reserve(times.size() > 0 ? times.size() - 1 : 0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double dt = times[i + 1] - times[i];
    if (!(dt > 0.0)) throw semantic_error("path cost: times must be strictly increasing");
    const double mean = integrand(i, dt);
    cost.per_interval.emplace_back(times[i], mean);
    if (mean == kInf) {
      cost.total = kInf;
      return cost;
    }
    cost.total += mean * dt;
  }
  return cost;
}

}  // namespace detail

/// Path cost of a state trajectory: trapezoidal quadrature of
/// hat L(rho(t), rho_dot(t)) with forward-difference velocities matched to the
/// same intervals (O(h^2)). Requires theta_minus > 0 for (rho0, theta0(traj)).
inline PathCost path_rate_state(const Network& net, const Trajectory& traj, const Vector& rho0) {
  if (traj.states.empty()) throw semantic_error("path_rate_state: empty trajectory");
  if ((traj.states.front().rho - rho0).lpNorm<Eigen::Infinity>() > 1e-9)
    throw semantic_error("path_rate_state: trajectory does not start at rho0");
  const double theta0 = traj.states.front().theta;
  const auto [tmin, tmax] = temperature_bounds(net, rho0, theta0);
  if (!(tmin > 0.0))
    throw hypothesis_error(
        "path_rate_state: theta_minus = 0 (cold-death regime, LDP hypothesis fails)");
  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;

  return detail::quadrature_path_cost(traj.times, [&](std::size_t i, double dt) {
    const Vector u = (traj.states[i + 1].rho - traj.states[i].rho) / dt;
    const double a = state_lagrangian(net, traj.states[i].rho, E0, u);
    const double b = state_lagrangian(net, traj.states[i + 1].rho, E0, u);
    return 0.5 * (a + b);
  });
}

/// Path cost of a cumulative-flux trajectory w(t) with rho(t) = rho0 + Gamma w(t).
inline PathCost path_rate_flux(const Network& net, const Trajectory& w_traj, const Vector& rho0) {
  if (!w_traj.has_fluxes()) throw semantic_error("path_rate_flux: trajectory has no flux record");
  if (w_traj.fluxes.front().lpNorm<Eigen::Infinity>() > 1e-12)
    throw semantic_error("path_rate_flux: w(0) must vanish");
  const double theta0 = w_traj.states.front().theta;
  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;

  std::vector<Vector> rho(w_traj.fluxes.size());
  for (std::size_t i = 0; i < w_traj.fluxes.size(); ++i) {
    rho[i] = rho0 + net.gamma_matrix() * w_traj.fluxes[i];
    const double theta = (E0 - net.energies().dot(rho[i])) / net.heat_capacity();
    if ((rho[i].array() < -1e-9).any() || theta < -1e-9)
      throw infeasible_error("path_rate_flux: path leaves the feasible set");
    rho[i] = rho[i].cwiseMax(0.0);
  }

  return detail::quadrature_path_cost(w_traj.times, [&](std::size_t i, double dt) {
    const Vector jdot = (w_traj.fluxes[i + 1] - w_traj.fluxes[i]) / dt;
    const double a = flux_lagrangian(net, rho[i], E0, jdot);
    const double b = flux_lagrangian(net, rho[i + 1], E0, jdot);
    return 0.5 * (a + b);
  });
}

/// Fenchel-Young gap of the (Psi, Psi*) pair: Psi(rho,j) + Psi*(rho,zeta) - zeta.j.
/// Non-negative, zero exactly at zeta = dPsi/dj.
inline double legendre_gap(const Network& net, const Vector& rho, double E0, const Vector& j,
                           const Vector& zeta) {
  const RateVector k = directed_rates_closed(net, rho, E0);
  double gap = -zeta.dot(j);
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    const double sigma = std::sqrt(k.values(p) * k.values(p + net.n_pairs()));
    gap += detail::pair_psi(sigma, j(p)) + detail::pair_psi_star(sigma, zeta(p));
  }
  return gap;
}

}  // namespace aniso
