#pragma once

#include <cmath>
#include <utility>

#include "aniso/balance.hpp"
#include "aniso/kinetics.hpp"
#include "aniso/network.hpp"
#include "aniso/quasipotential.hpp"
#include "aniso/trajectory.hpp"

namespace aniso {

/// Right-hand side of the coupled ODE: drho = Gamma J0, dtheta = -e.drho/c_H,
/// so e.drho + c_H dtheta = 0 holds up to the rounding of the dot product.
inline std::pair<Vector, double> rhs(const Network& net, const State& s) {
  Vector drho = net.gamma_matrix() * net_flux(net, s);
  const double dtheta = -net.energies().dot(drho) / net.heat_capacity();
  return {std::move(drho), dtheta};
}

struct IntegrateOptions {
  long long steps = 10000;       // fixed-step count for RK4
  bool adaptive = false;         // embedded RK45 (Dormand-Prince) instead
  double rel_tol = 1e-8;         // RK45 error control
  double abs_tol = 1e-10;
  double clamp_tol = 1e-9;       // negative-rho clamp threshold
  long long record_every = 1;    // thin the stored nodes
  bool with_fluxes = true;       // integrate cumulative net flux alongside
};

namespace detail {

// Extended state y = (rho, theta, w); linear energy invariant is preserved
// exactly by any Runge-Kutta step.
inline Vector ode_rhs_extended(const Network& net, const Vector& y) {
  const Eigen::Index X = net.n_species();
  const Eigen::Index R = net.n_pairs();
  State s;
  s.rho = y.head(X).cwiseMax(0.0);
  s.theta = std::max(y(X), 0.0);
  Vector j = net_flux(net, s);
  Vector dy(X + 1 + R);
  dy.head(X) = net.gamma_matrix() * j;
  dy(X) = -net.energies().dot(dy.head(X)) / net.heat_capacity();
  dy.tail(R) = j;
  return dy;
}

inline void check_and_clamp(const Network& net, Vector& y, double clamp_tol) {
  const Eigen::Index X = net.n_species();
  for (Eigen::Index x = 0; x <= X; ++x) {
    if (y(x) < -clamp_tol)
      throw convergence_error("integrate: step failure, state left the feasible set");
    if (y(x) < 0.0) y(x) = 0.0;
  }
}

}  // namespace detail

/// Integrate the macroscopic dynamics from s0 over [0, T]. Fixed-step RK4 by
/// default (h = T/steps); Dormand-Prince 5(4) with step control when
/// opts.adaptive is set. The cumulative net flux w(t) is integrated alongside.
inline Trajectory integrate(const Network& net, const State& s0, double T,
                            const IntegrateOptions& opts = {}) {
  if (!(T > 0.0)) throw semantic_error("integrate: T must be positive");
  const Eigen::Index X = net.n_species();
  const Eigen::Index R = net.n_pairs();
  Vector y(X + 1 + R);
  y.head(X) = s0.rho;
  y(X) = s0.theta;
  y.tail(R).setZero();

  Trajectory traj;
  auto record = [&](double t, const Vector& state) {
    traj.times.push_back(t);
    traj.states.push_back({state.head(X), state(X)});
    if (opts.with_fluxes) traj.fluxes.push_back(state.tail(R));
  };
  record(0.0, y);

  auto rk4_step = [&](const Vector& yin, double t0, double h) {
    (void)t0;
    Vector k1 = detail::ode_rhs_extended(net, yin);
    Vector k2 = detail::ode_rhs_extended(net, yin + 0.5 * h * k1);
    Vector k3 = detail::ode_rhs_extended(net, yin + 0.5 * h * k2);
    Vector k4 = detail::ode_rhs_extended(net, yin + h * k3);
    return Vector(yin + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  if (!opts.adaptive) {
    const double h = T / static_cast<double>(opts.steps);
    for (long long i = 0; i < opts.steps; ++i) {
      y = rk4_step(y, static_cast<double>(i) * h, h);
      detail::check_and_clamp(net, y, opts.clamp_tol);
      if ((i + 1) % opts.record_every == 0 || i + 1 == opts.steps)
        record(static_cast<double>(i + 1) * h, y);
    }
    return traj;
  }

  // Dormand-Prince 5(4) pair.
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384, 0.0,           500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0.0};
  static const double b4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  double t = 0.0;
  double h = T / 100.0;
  const double h_min = T * 1e-12;
  while (t < T) {
    h = std::min(h, T - t);
    std::array<Vector, 7> k;
    k[0] = detail::ode_rhs_extended(net, y);
    for (int s = 1; s < 7; ++s) {
      Vector ys = y;
      for (int j = 0; j < s; ++j) ys += h * a[s][j] * k[j];
      k[s] = detail::ode_rhs_extended(net, ys);
    }
    Vector y5 = y, y4 = y;
    for (int s = 0; s < 7; ++s) {
      y5 += h * b5[s] * k[s];
      y4 += h * b4[s] * k[s];
    }
    const double scale = opts.abs_tol + opts.rel_tol * y.cwiseAbs().maxCoeff();
    const double err = (y5 - y4).cwiseAbs().maxCoeff() / scale;
    if (err <= 1.0) {
      t += h;
      y = y5;
      detail::check_and_clamp(net, y, opts.clamp_tol);
      record(t, y);
    }
    h *= std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
    if (h < h_min) throw convergence_error("integrate: adaptive step underflow");
  }
  return traj;
}

/// Orthogonal projector onto Ran Gamma, from an orthonormal basis of the
/// column space (not from the entrywise complex formula).
inline Matrix projection_matrix(const Network& net) {
  return linalg::range_projector(net.gamma_matrix());
}

/// Unique anisothermal steady state: the minimiser of the quasipotential over
/// the attainable set, computed by the projected Newton of the quasipotential
/// module. Requires IDB, or ICB with constant transition energy, a bounded
/// attainable set, and theta_minus > 0.
inline State steady_state(const Network& net, const Vector& rho0, double theta0) {
  net.require_reversible("steady_state");
  const Vector pi = isothermal_steady_state(net, rho0);
  const auto [idb, idb_res] = check_idb(net, pi);
  if (!idb) {
    const auto [icb, icb_res] = check_icb(net, pi);
    double a0 = net.transition_energy(0);
    bool const_a = true;
    for (Eigen::Index p = 1; p < net.n_pairs(); ++p)
      const_a = const_a && std::abs(net.transition_energy(p) - a0) <= 1e-12;
    if (!icb || !const_a)
      throw hypothesis_error(
          "steady_state: needs IDB, or ICB with constant transition energy");
  }
  const auto [tmin, tmax] = temperature_bounds(net, rho0, theta0);
  if (!(tmin > 0.0)) throw hypothesis_error("steady_state: theta_minus must be positive");

  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  auto res = detail::minimize_entropy_on_class(net, pi, rho0, E0);
  return {res.rho, (E0 - net.energies().dot(res.rho)) / net.heat_capacity()};
}

}  // namespace aniso
