#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "aniso/kinetics.hpp"
#include "aniso/network.hpp"
#include "aniso/quasipotential.hpp"
#include "aniso/rng.hpp"

namespace aniso {

struct BalanceReport {
  Vector pi;
  bool idb = false;
  bool icb = false;
  double max_idb_residual = 0.0;
  double max_icb_residual = 0.0;
  bool wegscheider_ok = false;
};

/// log(kappa_fw/kappa_bw) lies in Ran Gamma^T iff an isothermal detailed-balance
/// state exists (standard Wegscheider condition).
inline bool wegscheider_check(const Network& net, double tol = 1e-9) {
  net.require_reversible("wegscheider_check");
  Vector lambda(net.n_pairs());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
    lambda(p) = std::log(net.kappa(fwd(p)) / net.kappa(rev(p)));
  return linalg::range_distance(net.gamma_matrix().transpose(), lambda) <= tol;
}

/// Pointwise detailed balance of the isothermal network at pi.
inline std::pair<bool, double> check_idb(const Network& net, const Vector& pi, double tol = 1e-9) {
  net.require_reversible("check_idb");
  if ((pi.array() <= 0.0).any()) throw semantic_error("check_idb: pi must be positive");
  double worst = 0.0;
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    const double f = net.kappa(fwd(p)) * mass_action(net, pi, fwd(p));
    const double b = net.kappa(rev(p)) * mass_action(net, pi, rev(p));
    worst = std::max(worst, std::abs(f - b));
  }
  return {worst <= tol, worst};
}

/// Per-complex flux balance of the isothermal network at pi; the per-complex
/// inflow/outflow sums are cross-checked against the test-function form
/// sum_r (kappa_r B_r - kappa_bw B_bw)(psi_{alpha_bw} - psi_{alpha_fw}) with
/// indicator test functions.
inline std::pair<bool, double> check_icb(const Network& net, const Vector& pi, double tol = 1e-9) {
  net.require_reversible("check_icb");
  if ((pi.array() <= 0.0).any()) throw semantic_error("check_icb: pi must be positive");

  auto key_of = [&](const Eigen::VectorXi& a) {
    std::vector<int> k(a.data(), a.data() + a.size());
    return k;
  };
  std::map<std::vector<int>, double> net_outflow;   // outflow - inflow per complex
  std::map<std::vector<int>, double> psi_form;

  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    for (Direction d : {fwd(p), rev(p)}) {
      const double k = net.kappa(d) * mass_action(net, pi, d);
      net_outflow[key_of(net.alpha(d))] += k;
      net_outflow[key_of(net.alpha(opposite(d)))] -= k;
    }
    const double j = net.kappa(fwd(p)) * mass_action(net, pi, fwd(p)) -
                     net.kappa(rev(p)) * mass_action(net, pi, rev(p));
    psi_form[key_of(net.alpha(rev(p)))] += j;
    psi_form[key_of(net.alpha(fwd(p)))] -= j;
  }

  double worst = 0.0;
  for (const auto& [key, v] : net_outflow) worst = std::max(worst, std::abs(v));
  for (const auto& [key, v] : psi_form) worst = std::max(worst, std::abs(v));
  return {worst <= tol, worst};
}

namespace detail {

/// Newton on the square system { B^T Gamma j(e^z) = 0, N^T (e^z - rho0) = 0 }
/// in log concentrations z, for networks without a detailed-balance state.
inline Vector steady_state_newton(const Network& net, const Vector& rho0, const Vector& z_start,
                                  Eigen::Index max_iter = 200) {
  const Matrix B = linalg::range_basis(net.gamma_matrix());
  const Matrix N = linalg::cokernel_basis(net.gamma_matrix());
  const Eigen::Index X = net.n_species();
  const Eigen::Index R = net.n_pairs();

  auto residual = [&](const Vector& z, Vector& G, Matrix* J) {
    const Vector pi = z.array().exp().matrix();
    Vector j(R);
    Matrix Dj = Matrix::Zero(R, X);
    for (Eigen::Index p = 0; p < R; ++p) {
      const double f = net.kappa(fwd(p)) * mass_action(net, pi, fwd(p));
      const double b = net.kappa(rev(p)) * mass_action(net, pi, rev(p));
      j(p) = f - b;
      if (J) {
        Dj.row(p) = f * net.alpha(fwd(p)).cast<double>().transpose() -
                    b * net.alpha(rev(p)).cast<double>().transpose();
      }
    }
    G.resize(B.cols() + N.cols());
    G.head(B.cols()) = B.transpose() * (net.gamma_matrix() * j);
    G.tail(N.cols()) = N.transpose() * (pi - rho0);
    if (J) {
      J->resize(B.cols() + N.cols(), X);
      J->topRows(B.cols()) = B.transpose() * net.gamma_matrix() * Dj;
      J->bottomRows(N.cols()) = N.transpose() * pi.asDiagonal();
    }
  };

  Vector z = z_start;
  Vector G;
  Matrix J;
  residual(z, G, &J);
  for (Eigen::Index iter = 0; iter < max_iter; ++iter) {
    if (G.lpNorm<Eigen::Infinity>() <= 1e-12) return z.array().exp().matrix();
    Vector step = J.colPivHouseholderQr().solve(-G);
    double t = 1.0;
    const double g0 = G.norm();
    while (t > 1e-12) {
      Vector zc = z + t * step;
      Vector Gc;
      residual(zc, Gc, nullptr);
      if (Gc.norm() <= (1.0 - 1e-4 * t) * g0) {
        z = std::move(zc);
        break;
      }
      t *= 0.5;  // damping
    }
    if (t <= 1e-12) throw convergence_error("isothermal steady state: line search stalled");
    residual(z, G, &J);
  }
  throw convergence_error("isothermal steady state: Newton did not converge");
}

}  // namespace detail

/// Steady state of the isothermal mass-action ODE in the stoichiometric class
/// of rho0. Wegscheider-consistent networks go through the convex
/// detailed-balance route; otherwise a damped Newton with random restarts
/// solves Gamma j(pi) = 0, and disagreeing restarts are reported.
inline Vector isothermal_steady_state(const Network& net, const Vector& rho0) {
  net.require_reversible("isothermal_steady_state");

  if (wegscheider_check(net)) {
    // gamma^r . log pi = log(kappa_fw/kappa_bw) is consistent: pi is the
    // entropy projection of exp(z_p) onto the class.
    Vector lambda(net.n_pairs());
    for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
      lambda(p) = std::log(net.kappa(fwd(p)) / net.kappa(rev(p)));
    const Matrix Gt = net.gamma_matrix().transpose();
    Vector z_p = Gt.colPivHouseholderQr().solve(lambda);
    Vector ref = z_p.array().exp().matrix();
    return detail::minimize_entropy_on_class(net, ref, rho0, std::nullopt).rho;
  }

  const Matrix B = linalg::range_basis(net.gamma_matrix());
  const Vector center = detail::interior_point(net, rho0, std::nullopt);
  Vector best;
  RngStream rng(0x9e3779b97f4a7c15ull, 0);
  Eigen::Index found = 0;
  for (int attempt = 0; attempt < 20; ++attempt) {
    Vector rho_start = center;
    if (attempt > 0) {
      // random strictly feasible start inside the class
      for (int tries = 0; tries < 64; ++tries) {
        Vector y(B.cols());
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = (rng.uniform() - 0.5);
        Vector cand = center + B * (y * center.minCoeff() * 2.0);
        if ((cand.array() > 0.0).all()) {
          rho_start = cand;
          break;
        }
      }
    }
    try {
      Vector pi = detail::steady_state_newton(net, rho0, rho_start.array().log().matrix());
      if (found == 0) {
        best = pi;
      } else if ((pi - best).lpNorm<Eigen::Infinity>() >
                 1e-6 * (1.0 + best.lpNorm<Eigen::Infinity>())) {
        throw convergence_error(
            "isothermal steady state: restarts disagree (multiple roots suspected)");
      }
      ++found;
    } catch (const convergence_error&) {
      if (attempt == 19 && found == 0) throw;
    }
  }
  if (found == 0)
    throw convergence_error("isothermal steady state: no positive steady state found");
  return best;
}

inline BalanceReport balance_report(const Network& net, const Vector& rho0, double tol = 1e-9) {
  BalanceReport rep;
  rep.pi = isothermal_steady_state(net, rho0);
  auto [idb, idb_res] = check_idb(net, rep.pi, tol);
  auto [icb, icb_res] = check_icb(net, rep.pi, tol);
  rep.idb = idb;
  rep.max_idb_residual = idb_res;
  rep.icb = icb;
  rep.max_icb_residual = icb_res;
  rep.wegscheider_ok = wegscheider_check(net, tol);
  return rep;
}

}  // namespace aniso
