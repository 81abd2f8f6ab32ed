#pragma once

#include <string>

#include <json.hpp>

#include "aniso/balance.hpp"
#include "aniso/boundary.hpp"
#include "aniso/io.hpp"
#include "aniso/macro.hpp"
#include "aniso/om_mft.hpp"
#include "aniso/quasipotential.hpp"

namespace aniso {

struct ReportOptions {
  Eigen::Index grid_per_dim = 50;
  Eigen::Index n_random = 100;
  std::uint64_t seed = 42;
  double hjb_tol = 1e-10;
  double om_tol = 1e-8;
  double tr_tol = 1e-10;
  double orth_tol = 1e-10;
};

inline nlohmann::json to_json(const BalanceReport& rep, const Network& net) {
  nlohmann::json j;
  for (Eigen::Index x = 0; x < rep.pi.size(); ++x) j["pi"][net.species()[x].name] = rep.pi(x);
  j["idb"] = rep.idb;
  j["icb"] = rep.icb;
  j["max_idb_residual"] = rep.max_idb_residual;
  j["max_icb_residual"] = rep.max_icb_residual;
  j["wegscheider_ok"] = rep.wegscheider_ok;
  return j;
}

inline nlohmann::json to_json(const DecompositionReport& rep) {
  nlohmann::json j;
  j["lagrangian"] = rep.lagrangian;
  j["psi"] = rep.psi;
  j["psi_star_at_force"] = rep.psi_star_at_force;
  j["force_work"] = rep.force_work;
  j["lambda_sym_asym"] = rep.lambda_sym_asym;
  j["lambda_asym_sym"] = rep.lambda_asym_sym;
  j["half_v_change"] = rep.half_v_change;
  j["asym_work_endpoint"] = rep.asym_work_endpoint;
  j["ineq_sym_slack"] = rep.ineq_sym_slack;
  j["ineq_asym_slack"] = rep.ineq_asym_slack;
  for (const auto& [name, v] : rep.residuals) j["residuals"][name] = v;
  return j;
}

/// Consolidated identity-check report: balance, LDP hypotheses, HJB residuals,
/// Onsager-Machlup and time-reversal (IDB), orthogonality and MFT splits
/// (ICB + constant transition energy). Sections that do not apply carry a
/// "skipped" entry with the reason instead of failing the whole report.
inline nlohmann::json report(const Network& net, const Vector& rho0, double theta0,
                             const ReportOptions& opts = {}) {
  nlohmann::json out;
  out["network"]["species"] = net.n_species();
  out["network"]["reaction_pairs"] = net.n_pairs();
  out["network"]["reversible"] = net.reversible();
  for (const auto& w : net.warnings()) out["network"]["warnings"].push_back(w);

  const HypothesisReport hyp = hypothesis_check(net, rho0, theta0);
  out["hypotheses"]["bounded"] = hyp.bounded;
  if (hyp.bounded) {
    out["hypotheses"]["theta_minus"] = hyp.theta_minus;
    out["hypotheses"]["theta_plus"] = hyp.theta_plus;
  }
  out["hypotheses"]["theta_positive"] = hyp.theta_positive;
  out["hypotheses"]["ok"] = hyp.ok;
  out["hypotheses"]["detail"] = hyp.detail;

  if (!net.reversible()) {
    out["balance"]["skipped"] = "network has irreversible reactions";
    out["hjb"]["skipped"] = "network has irreversible reactions";
    out["onsager_machlup"]["skipped"] = "network has irreversible reactions";
    out["time_reversal"]["skipped"] = "network has irreversible reactions";
    out["orthogonality"]["skipped"] = "network has irreversible reactions";
    out["mft"]["skipped"] = "network has irreversible reactions";
    return out;
  }

  BalanceReport bal;
  bool have_balance = false;
  try {
    bal = balance_report(net, rho0);
    out["balance"] = to_json(bal, net);
    have_balance = true;
  } catch (const error& e) {
    out["balance"]["skipped"] = e.what();
  }

  if (!hyp.ok || !have_balance) {
    const std::string reason = !have_balance ? "no isothermal steady state"
                                             : "LDP hypotheses violated: " + hyp.detail;
    out["hjb"]["skipped"] = reason;
    out["onsager_machlup"]["skipped"] = reason;
    out["time_reversal"]["skipped"] = reason;
    out["orthogonality"]["skipped"] = reason;
    out["mft"]["skipped"] = reason;
    return out;
  }

  bool const_a = true;
  for (Eigen::Index p = 1; p < net.n_pairs(); ++p)
    const_a = const_a && std::abs(net.transition_energy(p) - net.transition_energy(0)) <= 1e-12;
  const bool hjb_applies = bal.idb || (bal.icb && const_a);

  const Quasipotential qp = make_quasipotential(net, bal.pi, rho0, theta0);
  const auto grid = interior_grid(net, rho0, theta0, opts.grid_per_dim);
  RngStream rng(opts.seed, 0);

  {
    double worst = 0.0;
    for (const auto& rho : grid) worst = std::max(worst, std::abs(hjb_residual(qp, rho)));
    out["hjb"]["grid_points"] = grid.size();
    out["hjb"]["max_residual"] = worst;
    out["hjb"]["expected_zero"] = hjb_applies;
    out["hjb"]["pass"] = hjb_applies ? worst <= opts.hjb_tol : worst > 1e-3;
  }

  if (bal.idb) {
    double worst_rel = 0.0;
    const auto pts = random_interior_points(net, rho0, theta0, opts.n_random, rng);
    for (const auto& rho : pts) {
      Vector c(net.n_pairs());
      for (Eigen::Index p = 0; p < net.n_pairs(); ++p) c(p) = 2.0 * rng.uniform() - 1.0;
      const Vector u = net.gamma_matrix() * c;
      const double resid = om_decomposition_residual(net, qp, rho, u);
      const double scale =
          std::max(1.0, std::abs(state_lagrangian(net, rho, qp.E0, u)));
      worst_rel = std::max(worst_rel, resid / scale);
    }
    out["onsager_machlup"]["samples"] = opts.n_random;
    out["onsager_machlup"]["max_relative_residual"] = worst_rel;
    out["onsager_machlup"]["pass"] = worst_rel <= opts.om_tol;

    double worst_tr = 0.0;
    const auto pts_tr = random_interior_points(net, rho0, theta0, opts.n_random, rng);
    for (const auto& rho : pts_tr) {
      Vector xi(net.n_species());
      for (Eigen::Index x = 0; x < net.n_species(); ++x) xi(x) = 2.0 * rng.uniform() - 1.0;
      worst_tr = std::max(worst_tr, time_reversal_residual(net, qp, rho, xi));
    }
    out["time_reversal"]["samples"] = opts.n_random;
    out["time_reversal"]["max_residual"] = worst_tr;
    out["time_reversal"]["pass"] = worst_tr <= opts.tr_tol;
  } else {
    out["onsager_machlup"]["skipped"] = "network is not in isothermal detailed balance";
    double worst_tr = 0.0;
    const auto pts_tr = random_interior_points(net, rho0, theta0, opts.n_random, rng);
    for (const auto& rho : pts_tr) {
      Vector xi(net.n_species());
      for (Eigen::Index x = 0; x < net.n_species(); ++x) xi(x) = 2.0 * rng.uniform() - 1.0;
      worst_tr = std::max(worst_tr, time_reversal_residual(net, qp, rho, xi));
    }
    out["time_reversal"]["samples"] = opts.n_random;
    out["time_reversal"]["max_residual"] = worst_tr;
    out["time_reversal"]["symmetry_violated"] = worst_tr > 1e-3;
  }

  if (hjb_applies) {
    double worst_r = 0.0, worst_cross = 0.0;
    for (const auto& rho : grid) {
      const auto [r1, r2] = orthogonality_residual(net, qp, rho);
      worst_r = std::max({worst_r, r1, r2});
      const LambdaTerms lt = lambda_terms(net, qp, rho);
      worst_cross = std::max({worst_cross, lt.cross_residual_sym_asym,
                              lt.cross_residual_asym_sym});
    }
    out["orthogonality"]["max_residual"] = worst_r;
    out["orthogonality"]["max_lambda_cross_residual"] = worst_cross;
    out["orthogonality"]["pass"] = worst_r <= opts.orth_tol && worst_cross <= opts.orth_tol;

    IntegrateOptions iopts;
    iopts.steps = 2000;
    iopts.record_every = 1;
    const Trajectory traj = integrate(net, State{rho0, theta0}, 2.0, iopts);
    const DecompositionReport rep = mft_path_report(net, qp, traj);
    out["mft"] = to_json(rep);
    out["mft"]["pass"] = rep.residuals.at("sym_split") <= 1e-4 &&
                         rep.residuals.at("asym_split") <= 1e-4 &&
                         rep.half_v_change <= 1e-12 &&
                         rep.asym_work_endpoint >= -1e-12 &&
                         rep.ineq_sym_slack >= -1e-10 && rep.ineq_asym_slack >= -1e-10;
  } else {
    out["orthogonality"]["skipped"] = "needs IDB, or ICB with constant transition energy";
    out["mft"]["skipped"] = "needs IDB, or ICB with constant transition energy";
  }
  return out;
}

}  // namespace aniso
