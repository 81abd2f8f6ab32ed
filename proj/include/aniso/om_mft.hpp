#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "aniso/balance.hpp"
#include "aniso/dissipation.hpp"
#include "aniso/ldp.hpp"
#include "aniso/quasipotential.hpp"
#include "aniso/trajectory.hpp"

namespace aniso {

/// Thermodynamic force per pair and its symmetric/antisymmetric split.
/// total = sym + asym exactly; asym is constant in rho.
struct ForceSplit {
  Vector total;
  Vector sym;   // -1/2 Gamma^T grad V
  Vector asym;  // 1/2 log(kappa_fw pi^alpha_fw / (kappa_bw pi^alpha_bw))
};

/// Dual dissipation potential on fluxes:
/// Psi*(rho, zeta) = 2 sum_r sqrt(k_r k_bw) (cosh(zeta_r) - 1).
inline double psi_star_flux(const Network& net, const Vector& rho, double E0, const Vector& zeta) {
  const RateVector k = directed_rates_closed(net, rho, E0);
  double v = 0.0;
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
    v += detail::pair_psi_star(std::sqrt(k.values(p) * k.values(p + net.n_pairs())), zeta(p));
  return v;
}

/// Dissipation potential on fluxes, the Legendre dual of psi_star_flux:
/// Psi(rho, j) = 2 sum_r sqrt(k_r k_bw) (cosh*(j_r / (2 sqrt(k_r k_bw))) + 1).
inline double psi_flux(const Network& net, const Vector& rho, double E0, const Vector& j) {
  const RateVector k = directed_rates_closed(net, rho, E0);
  double v = 0.0;
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    const double c = detail::pair_psi(std::sqrt(k.values(p) * k.values(p + net.n_pairs())), j(p));
    if (c == kInf) return kInf;
    v += c;
  }
  return v;
}

/// Dual dissipation potential on velocities: Psi-hat*(rho, xi) with zeta_r = xi . gamma^r.
inline double psi_hat_star(const Network& net, const Vector& rho, double E0, const Vector& xi) {
  Vector zeta(net.n_pairs());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) zeta(p) = xi.dot(net.gamma(fwd(p)));
  return psi_star_flux(net, rho, E0, zeta);
}

/// Dissipation potential on velocities: the contraction inf { Psi(rho, j) :
/// Gamma j = u }, evaluated through the same dual Newton as the state
/// Lagrangian; +inf off Ran Gamma.
inline double psi_hat(const Network& net, const Vector& rho, double E0, const Vector& u) {
  const RateVector k = directed_rates_closed(net, rho, E0);
  return detail::contraction_dual(net, k, u, DualKind::dissipation).value;
}

/// Antisymmetric force from the isothermal steady state alone; constant in rho.
inline Vector asym_force(const Network& net, const Vector& pi) {
  Vector f(net.n_pairs());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
    f(p) = 0.5 * std::log(net.kappa(fwd(p)) * mass_action(net, pi, fwd(p)) /
                          (net.kappa(rev(p)) * mass_action(net, pi, rev(p))));
  return f;
}

/// Force F_r = 1/2 log(k_r/k_bw) and its split. Valid on the interior of the
/// feasible set only (all rates positive).
inline ForceSplit forces(const Network& net, const Quasipotential& qp, const Vector& rho) {
  net.require_reversible("forces");
  const RateVector k = directed_rates_closed(net, rho, qp.E0);
  if ((k.values.array() <= 0.0).any())
    throw boundary_error("forces: some reaction rate vanishes (state not interior)");
  const Vector gv = gradient(qp, rho);
  ForceSplit fs;
  fs.total.resize(net.n_pairs());
  fs.sym.resize(net.n_pairs());
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    fs.total(p) = 0.5 * std::log(k.values(p) / k.values(p + net.n_pairs()));
    fs.sym(p) = -0.5 * net.gamma(fwd(p)).dot(gv);
  }
  fs.asym = fs.total - fs.sym;
  return fs;
}

/// Onsager-Machlup defect |hat L - hat Psi - hat Psi*(-1/2 grad V) - 1/2 grad V . u|.
/// Zero under IDB; the IDB hypothesis is checked and enforced.
inline double om_decomposition_residual(const Network& net, const Quasipotential& qp,
                                        const Vector& rho, const Vector& u) {
  const auto [idb, res] = check_idb(net, qp.pi);
  if (!idb)
    throw hypothesis_error("om_decomposition_residual: network is not in isothermal detailed "
                           "balance at pi (residual " +
                           std::to_string(res) + ")");
  const Vector gv = gradient(qp, rho);
  const double lhs = state_lagrangian(net, rho, qp.E0, u);
  const double rhs = psi_hat(net, rho, qp.E0, u) +
                     psi_hat_star(net, rho, qp.E0, Vector(-0.5 * gv)) + 0.5 * gv.dot(u);
  return std::abs(lhs - rhs);
}

/// Time-reversal symmetry in dual form: |H(rho, xi + 1/2 grad V) - H(rho, -xi + 1/2 grad V)|.
inline double time_reversal_residual(const Network& net, const Quasipotential& qp,
                                     const Vector& rho, const Vector& xi) {
  const Vector gv = gradient(qp, rho);
  return std::abs(hamiltonian(net, rho, qp.E0, Vector(xi + 0.5 * gv)) -
                  hamiltonian(net, rho, qp.E0, Vector(-xi + 0.5 * gv)));
}

/// Rates of the time-reversed (adjoint) process, from
/// k_adj_bw(r) = k_r exp(gamma^r . grad V); flat-indexed like RateVector.
inline RateVector adjoint_rates(const Network& net, const Quasipotential& qp, const Vector& rho) {
  const RateVector k = directed_rates_closed(net, rho, qp.E0);
  const Vector gv = gradient(qp, rho);
  RateVector adj;
  adj.values.resize(net.n_directions());
  const Eigen::Index P = net.n_pairs();
  for (Eigen::Index p = 0; p < P; ++p) {
    const double z = net.gamma(fwd(p)).dot(gv);
    adj.values(p + P) = k.values(p) * std::exp(z);   // adjoint backward rate
    adj.values(p) = k.values(p + P) * std::exp(-z);  // adjoint forward rate
  }
  return adj;
}

namespace detail {

inline void require_icb_const_a(const Network& net, const Quasipotential& qp, const char* op) {
  const auto [idb, idb_res] = check_idb(net, qp.pi);
  if (idb) return;  // IDB implies ICB and needs no constant transition energy
  const auto [icb, icb_res] = check_icb(net, qp.pi);
  bool const_a = true;
  for (Eigen::Index p = 1; p < net.n_pairs(); ++p)
    const_a = const_a && std::abs(net.transition_energy(p) - net.transition_energy(0)) <= 1e-12;
  if (!icb || !const_a)
    throw hypothesis_error(std::string(op) +
                           ": needs IDB, or ICB with constant transition energy");
}

}  // namespace detail

/// The two generalised Fisher informations, by both routes: the explicit sums
/// (with the theta^q prefactor the rates carry) and the adjoint-rate form
/// 1/2 sum (sqrt(k) - sqrt(k_adj))^2. Residuals between routes are reported.
struct LambdaTerms {
  double lambda_sym_asym = 0.0;  // pairs with Psi*(F_sym):  Psi*(F) = Psi*(F_sym) + this
  double lambda_asym_sym = 0.0;  // pairs with Psi*(F_asym): Psi*(F) = Psi*(F_asym) + this
  double cross_residual_sym_asym = 0.0;  // |explicit - adjoint-rate form|
  double cross_residual_asym_sym = 0.0;
};

inline LambdaTerms lambda_terms(const Network& net, const Quasipotential& qp, const Vector& rho) {
  detail::require_icb_const_a(net, qp, "lambda_terms");
  const double theta = temperature_from_energy(net, rho, qp.E0);
  if (!(theta > 0.0) || (rho.array() <= 0.0).any())
    throw boundary_error("lambda_terms: state not interior");
  const double tq = std::pow(theta, net.arrhenius_exponent());
  const double kB = net.boltzmann_constant();
  const Vector ratio = (rho.array() / qp.pi.array()).matrix();

  double lam_sa = 0.0, lam_as = 0.0;
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    for (Direction d : {fwd(p), rev(p)}) {
      const Direction o = opposite(d);
      const double arr_d = std::exp(-net.barrier(d) / (kB * theta));
      const double arr_o = std::exp(-net.barrier(o) / (kB * theta));
      const double ratio_d = mass_action(net, ratio, d);
      const double ratio_o = mass_action(net, ratio, o);
      const double kpi_d = net.kappa(d) * mass_action(net, qp.pi, d);
      const double kpi_o = net.kappa(o) * mass_action(net, qp.pi, o);
      const double s1 = std::sqrt(kpi_d) - std::sqrt(kpi_o);
      lam_sa += 0.5 * tq * arr_d * ratio_d * s1 * s1;
      const double s2 = std::sqrt(arr_d * ratio_d) - std::sqrt(arr_o * ratio_o);
      lam_as += 0.5 * tq * kpi_d * s2 * s2;
    }
  }

  const RateVector k = directed_rates_closed(net, rho, qp.E0);
  const RateVector adj = adjoint_rates(net, qp, rho);
  double lam_sa_adj = 0.0, lam_as_adj = 0.0;
  const Eigen::Index P = net.n_pairs();
  for (Eigen::Index i = 0; i < 2 * P; ++i) {
    const Eigen::Index iopp = i < P ? i + P : i - P;
    const double d1 = std::sqrt(k.values(i)) - std::sqrt(adj.values(i));
    const double d2 = std::sqrt(k.values(i)) - std::sqrt(adj.values(iopp));
    lam_sa_adj += 0.5 * d1 * d1;
    lam_as_adj += 0.5 * d2 * d2;
  }

  LambdaTerms lt;
  lt.lambda_sym_asym = lam_sa;
  lt.lambda_asym_sym = lam_as;
  lt.cross_residual_sym_asym = std::abs(lam_sa - lam_sa_adj);
  lt.cross_residual_asym_sym = std::abs(lam_as - lam_as_adj);
  return lt;
}

/// Generalised-orthogonality defects of the two decompositions of Psi*(F):
/// r1 = |Psi*(F) - Psi*(F_sym) - Lambda_sym^asym|,
/// r2 = |Psi*(F) - Psi*(F_asym) - Lambda_asym^sym|.
inline std::pair<double, double> orthogonality_residual(const Network& net,
                                                        const Quasipotential& qp,
                                                        const Vector& rho) {
  detail::require_icb_const_a(net, qp, "orthogonality_residual");
  const ForceSplit fs = forces(net, qp, rho);
  const LambdaTerms lt = lambda_terms(net, qp, rho);
  const double full = psi_star_flux(net, rho, qp.E0, fs.total);
  const double r1 = std::abs(full - psi_star_flux(net, rho, qp.E0, fs.sym) - lt.lambda_sym_asym);
  const double r2 = std::abs(full - psi_star_flux(net, rho, qp.E0, fs.asym) - lt.lambda_asym_sym);
  return {r1, r2};
}

/// Evaluated MFT decomposition of a flux path.
struct DecompositionReport {
  double lagrangian = 0.0;         // J = int L(rho, w_dot)
  double psi = 0.0;                // int Psi(rho, w_dot)
  double psi_star_at_force = 0.0;  // int Psi*(rho, F)
  double force_work = 0.0;         // int F . w_dot
  double lambda_sym_asym = 0.0;    // int Lambda_sym^asym
  double lambda_asym_sym = 0.0;    // int Lambda_asym^sym
  double half_v_change = 0.0;      // 1/2 (V(rho(T)) - V(rho(0)))
  double asym_work_endpoint = 0.0; // F_asym . w(T)
  // Slacks of the two integrated estimates; both equal an integral of a
  // non-negative modified Lagrangian, hence >= 0 up to quadrature:
  double ineq_sym_slack = 0.0;   // 1/2 V(0) + J - 1/2 V(T) - int Lambda_asym^sym = int L_{F_asym}
  double ineq_asym_slack = 0.0;  // J + F_asym.w(T) - int Lambda_sym^asym        = int L_{F_sym}
  std::map<std::string, double> residuals;
};

/// Integrated MFT decompositions (symmetric and antisymmetric splits) of a
/// feasible flux path, with their defects against the quadrature of L and the
/// endpoint work identities.
inline DecompositionReport mft_path_report(const Network& net, const Quasipotential& qp,
                                           const Trajectory& traj) {
  detail::require_icb_const_a(net, qp, "mft_path_report");
  if (!traj.has_fluxes())
    throw semantic_error("mft_path_report: trajectory has no flux record");
  const Vector rho0 = traj.states.front().rho;

  const PathCost j_cost = path_rate_flux(net, traj, rho0);
  const Vector f_asym = asym_force(net, qp.pi);
  const std::size_t n = traj.times.size();

  // Per-node evaluations, then trapezoid with forward-difference velocities.
  DecompositionReport rep;
  rep.lagrangian = j_cost.total;
  double int_L_fasym = 0.0, int_L_fsym = 0.0, int_work_sym = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = traj.times[i + 1] - traj.times[i];
    const Vector wdot = (traj.fluxes[i + 1] - traj.fluxes[i]) / dt;
    double psi_m = 0.0, psi_star_m = 0.0, work_m = 0.0, work_sym_m = 0.0;
    double lam_sa_m = 0.0, lam_as_m = 0.0, l_fasym_m = 0.0, l_fsym_m = 0.0;
    for (std::size_t node : {i, i + 1}) {
      const Vector& rho = traj.states[node].rho;
      const ForceSplit fs = forces(net, qp, rho);
      const LambdaTerms lt = lambda_terms(net, qp, rho);
      const double psi_v = psi_flux(net, rho, qp.E0, wdot);
      const double psi_star_f = psi_star_flux(net, rho, qp.E0, fs.total);
      const double psi_star_fasym = psi_star_flux(net, rho, qp.E0, fs.asym);
      const double psi_star_fsym = psi_star_flux(net, rho, qp.E0, fs.sym);
      psi_m += 0.5 * psi_v;
      psi_star_m += 0.5 * psi_star_f;
      work_m += 0.5 * fs.total.dot(wdot);
      work_sym_m += 0.5 * fs.sym.dot(wdot);
      lam_sa_m += 0.5 * lt.lambda_sym_asym;
      lam_as_m += 0.5 * lt.lambda_asym_sym;
      l_fasym_m += 0.5 * (psi_v + psi_star_fasym - fs.asym.dot(wdot));
      l_fsym_m += 0.5 * (psi_v + psi_star_fsym - fs.sym.dot(wdot));
    }
    rep.psi += psi_m * dt;
    rep.psi_star_at_force += psi_star_m * dt;
    rep.force_work += work_m * dt;
    rep.lambda_sym_asym += lam_sa_m * dt;
    rep.lambda_asym_sym += lam_as_m * dt;
    int_L_fasym += l_fasym_m * dt;
    int_L_fsym += l_fsym_m * dt;
    int_work_sym += work_sym_m * dt;
  }

  const double v0 = value(qp, traj.states.front().rho);
  const double vT = value(qp, traj.states.back().rho);
  rep.half_v_change = 0.5 * (vT - v0);
  rep.asym_work_endpoint = f_asym.dot(traj.fluxes.back());

  const double sym_split = int_L_fasym + rep.lambda_asym_sym + rep.half_v_change;
  const double asym_split = int_L_fsym + rep.lambda_sym_asym - rep.asym_work_endpoint;
  rep.ineq_sym_slack = -rep.half_v_change + rep.lagrangian - rep.lambda_asym_sym;
  rep.ineq_asym_slack = rep.lagrangian + rep.asym_work_endpoint - rep.lambda_sym_asym;

  rep.residuals["sym_split"] = std::abs(rep.lagrangian - sym_split);
  rep.residuals["asym_split"] = std::abs(rep.lagrangian - asym_split);
  rep.residuals["eq_force_decomposition"] =
      std::abs(rep.lagrangian - (rep.psi + rep.psi_star_at_force - rep.force_work));
  rep.residuals["work_sym_endpoint"] = std::abs(int_work_sym + rep.half_v_change);
  rep.residuals["work_asym_endpoint"] =
      std::abs((rep.force_work - int_work_sym) - rep.asym_work_endpoint);
  return rep;
}

}  // namespace aniso
