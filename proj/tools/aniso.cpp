// Command-line front end: validate networks, run the deterministic and
// stochastic dynamics, and check the quasipotential / Onsager-Machlup / MFT
// identities. Artifacts are plot-ready CSV/JSON with stable bytes: floats are
// %.12g, JSON keys sorted, lines LF-terminated, and all randomness flows from
// --seed through named Philox4x32-10 streams.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <aniso/aniso.hpp>

namespace {

using namespace aniso;

constexpr std::uint64_t kDefaultSeed = 42;

struct GlobalConfig {
  std::string out_dir = ".";
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::map<std::string, double> tolerances;
};

double tol_or(const GlobalConfig& cfg, const std::string& name, double fallback) {
  auto it = cfg.tolerances.find(name);
  return it == cfg.tolerances.end() ? fallback : it->second;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw semantic_error("cannot open file '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_artifact(const GlobalConfig& cfg, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw semantic_error("cannot write artifact '" + path + "'");
  out << content;
  std::cout << "wrote " << path << "\n";
}

Network load_network(const std::string& path) {
  Network net = parse_network(read_file(path));
  for (const auto& w : net.warnings()) std::cerr << "warning: " << w << "\n";
  return net;
}

Vector parse_vector(const std::string& csv, Eigen::Index expected, const char* what) {
  std::vector<double> vals;
  std::size_t start = 0;
  try {
    while (start <= csv.size()) {
      std::size_t comma = csv.find(',', start);
      if (comma == std::string::npos) comma = csv.size();
      vals.push_back(std::stod(csv.substr(start, comma - start)));
      start = comma + 1;
    }
  } catch (const std::exception&) {
    throw semantic_error(std::string(what) + ": not a comma-separated list of numbers");
  }
  if (static_cast<Eigen::Index>(vals.size()) != expected)
    throw semantic_error(std::string(what) + ": expected " + std::to_string(expected) +
                         " comma-separated values");
  Vector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = vals[i];
  return v;
}

CountVector counts_from_rho(const Vector& rho, long long V) {
  CountVector c(rho.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    c(i) = std::llround(rho(i) * static_cast<double>(V));
  return c;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"anisothermal reaction-network toolkit"};
  app.require_subcommand(1);

  GlobalConfig cfg;
  std::vector<std::string> tol_args;
  app.add_option("--out", cfg.out_dir, "artifact output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "RNG seed (deterministic by default)")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads for ensembles")
      ->capture_default_str();
  app.add_option("--tol", tol_args, "tolerance override NAME=VALUE (repeatable)");

  std::string net_path, rho0_str, traj_path, query_path;
  double theta0 = 1.0, T = 1.0, E0V_opt = -1.0;
  long long V = 100, N = 1, steps = 10000, samples = 1000000, burn_in = 10000, thin = 1;
  Eigen::Index grid = 50;
  long long record_every = 1;
  bool adaptive = false, empirical = false, flux_traj = false;

  auto add_net = [&](CLI::App* sub) {
    sub->add_option("network", net_path, "network document (JSON)")->required();
  };
  auto add_state = [&](CLI::App* sub) {
    sub->add_option("--rho0", rho0_str, "initial concentrations, comma-separated")->required();
    sub->add_option("--theta0", theta0, "initial temperature")->capture_default_str();
  };

  auto* c_validate = app.add_subcommand("validate", "parse and validate a network document");
  add_net(c_validate);

  auto* c_rates = app.add_subcommand("rates", "reaction rates and net flux at a state");
  add_net(c_rates);
  add_state(c_rates);

  auto* c_ode = app.add_subcommand("ode", "integrate the macroscopic dynamics");
  add_net(c_ode);
  add_state(c_ode);
  c_ode->add_option("--T", T, "time horizon")->required();
  c_ode->add_option("--steps", steps, "RK4 step count")->capture_default_str();
  c_ode->add_flag("--adaptive", adaptive, "use embedded RK45 instead of fixed-step RK4");
  c_ode->add_option("--record-every", record_every, "record every k-th step")
      ->capture_default_str();

  auto* c_ssa = app.add_subcommand("ssa", "stochastic simulation (Gillespie) paths");
  add_net(c_ssa);
  add_state(c_ssa);
  c_ssa->add_option("--V", V, "volume parameter")->required();
  c_ssa->add_option("--T", T, "time horizon")->required();
  c_ssa->add_option("--N", N, "number of independent paths")->capture_default_str();

  std::string v_list_str;
  double rate_target = 0.3;
  auto* c_inv = app.add_subcommand("invariant", "invariant measure (exact A<=>B or empirical)");
  add_net(c_inv);
  add_state(c_inv);
  c_inv->add_option("--V", V, "volume parameter")->required();
  c_inv->add_flag("--empirical", empirical, "estimate by SSA occupation instead of exact");
  c_inv->add_option("--samples", samples, "recorded holding intervals")->capture_default_str();
  c_inv->add_option("--burn-in", burn_in, "discarded jumps before recording")
      ->capture_default_str();
  c_inv->add_option("--thin", thin, "record every k-th holding interval")->capture_default_str();
  c_inv->add_option("--E0V", E0V_opt, "micro total energy (default from rho0/theta0)");
  c_inv->add_option("--rate-table", v_list_str,
                    "also emit the LDP rate-convergence table for these volumes "
                    "(comma-separated)");
  c_inv->add_option("--target", rate_target, "target concentration of the counted species")
      ->capture_default_str();

  auto* c_qp = app.add_subcommand("quasipotential", "value/gradient/HJB residual on a grid");
  add_net(c_qp);
  add_state(c_qp);
  c_qp->add_option("--grid", grid, "points per free dimension")->capture_default_str();

  auto* c_ldp = app.add_subcommand("ldp", "path cost of a trajectory CSV");
  add_net(c_ldp);
  add_state(c_ldp);
  c_ldp->add_option("--traj", traj_path, "trajectory CSV (from the ode/ssa artifacts)")
      ->required();
  c_ldp->add_flag("--flux", flux_traj, "treat input as a flux path (w columns required)");

  auto* c_check = app.add_subcommand("check", "identity checks");
  c_check->require_subcommand(1);
  auto* k_balance = c_check->add_subcommand("balance", "IDB/ICB/Wegscheider report");
  add_net(k_balance);
  add_state(k_balance);
  auto* k_hjb = c_check->add_subcommand("hjb", "HJB residual on an interior grid");
  add_net(k_hjb);
  add_state(k_hjb);
  k_hjb->add_option("--grid", grid, "points per free dimension")->capture_default_str();
  auto* k_om = c_check->add_subcommand("om", "Onsager-Machlup decomposition residual");
  add_net(k_om);
  add_state(k_om);
  k_om->add_option("--samples", N, "random (rho,u) samples")->capture_default_str();
  auto* k_mft = c_check->add_subcommand("mft", "integrated MFT decompositions");
  add_net(k_mft);
  add_state(k_mft);
  k_mft->add_option("--T", T, "expected-path horizon")->capture_default_str();
  auto* k_orth = c_check->add_subcommand("orthogonality", "generalised orthogonality residuals");
  add_net(k_orth);
  add_state(k_orth);
  k_orth->add_option("--grid", grid, "points per free dimension")->capture_default_str();
  auto* k_boundary = c_check->add_subcommand("boundary", "boundary escape classification");
  add_net(k_boundary);
  add_state(k_boundary);
  k_boundary->add_option("--query", query_path, "BoundaryQuery JSON")->required();

  auto* c_report = app.add_subcommand("report", "consolidated identity report (JSON)");
  add_net(c_report);
  add_state(c_report);
  c_report->add_option("--grid", grid, "points per free dimension")->capture_default_str();

  // Global flags (--out, --seed, ...) may appear after the subcommand name.
  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
  }

  app.parse(argc, argv);

  for (const auto& t : tol_args) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--tol", "expected NAME=VALUE");
    cfg.tolerances[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
  }
  if (const char* env = std::getenv("ANISO_THREADS")) cfg.threads = std::stoul(env);

  if (*c_validate) {
    const Network net = load_network(net_path);
    std::cout << "ok: " << net.n_species() << " species, " << net.n_pairs()
              << " reaction pairs, " << (net.reversible() ? "reversible" : "irreversible")
              << ", " << net.warnings().size() << " warnings\n";
    return 0;
  }

  const Network net = load_network(net_path);
  const Vector rho0 =
      rho0_str.empty() ? Vector() : parse_vector(rho0_str, net.n_species(), "--rho0");

  if (*c_rates) {
    const State s{rho0, theta0};
    std::string csv = "pair,direction,kappa,arrhenius,mass_action,rate\n";
    for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
      for (Direction d : {fwd(p), rev(p)}) {
        csv += std::to_string(p);
        csv += d.backward ? ",bw" : ",fw";
        csv += "," + io::format_double(net.kappa(d));
        csv += "," + io::format_double(arrhenius(net, s.theta, d));
        csv += "," + io::format_double(mass_action(net, s.rho, d));
        csv += "," + io::format_double(rate(net, s, d)) + "\n";
      }
    }
    write_artifact(cfg, "rates.csv", csv);
    const Vector j = net_flux(net, s);
    std::cout << "net flux:";
    for (Eigen::Index p = 0; p < net.n_pairs(); ++p) std::cout << " " << io::format_double(j(p));
    std::cout << "\n";
    return 0;
  }

  if (*c_ode) {
    IntegrateOptions opts;
    opts.steps = steps;
    opts.adaptive = adaptive;
    opts.record_every = record_every;
    const Trajectory traj = integrate(net, State{rho0, theta0}, T, opts);
    write_artifact(cfg, "trajectory.csv", trajectory_csv(net, traj));
    const double E0 = total_energy(net, State{rho0, theta0});
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(total_energy(net, s) - E0));
    std::cout << "final state theta=" << io::format_double(traj.states.back().theta)
              << ", max energy drift " << io::format_double(drift) << "\n";
    return 0;
  }

  if (*c_ssa) {
    const CountVector counts0 = counts_from_rho(rho0, V);
    for (long long i = 0; i < N; ++i) {
      const PathResult pr = simulate_path(net, counts0, theta0, V, T, cfg.seed,
                                          static_cast<std::uint64_t>(i));
      write_artifact(cfg, "ssa_events_" + std::to_string(i) + ".csv", event_log_csv(pr.events));
      if (i == 0) write_artifact(cfg, "ssa_path_0.csv", trajectory_csv(net, pr.trajectory));
    }
    const EnsembleSummary sum =
        ensemble(net, counts0, theta0, V, T, N, cfg.seed, 101, cfg.threads);
    std::string csv = "t";
    for (const auto& s : net.species()) csv += ",mean_" + s.name + ",var_" + s.name;
    csv += ",mean_theta,var_theta\n";
    for (std::size_t i = 0; i < sum.times.size(); ++i) {
      csv += io::format_double(sum.times[i]);
      for (Eigen::Index x = 0; x < net.n_species(); ++x)
        csv += "," + io::format_double(sum.mean_rho(i, x)) + "," +
               io::format_double(sum.var_rho(i, x));
      csv += "," + io::format_double(sum.mean_theta(i)) + "," +
             io::format_double(sum.var_theta(i)) + "\n";
    }
    write_artifact(cfg, "ssa_summary.csv", csv);
    std::string flux_csv;
    for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
      flux_csv += (p ? "," : "") + ("w_" + std::to_string(p));
    flux_csv += "\n";
    for (const auto& w : sum.terminal_flux) {
      for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
        flux_csv += (p ? "," : "") + io::format_double(w(p));
      flux_csv += "\n";
    }
    write_artifact(cfg, "ssa_terminal_flux.csv", flux_csv);
    std::cout << "paths=" << N << " absorbed=" << sum.absorbed_paths << "\n";
    return 0;
  }

  if (*c_inv) {
    const CountVector counts0 = counts_from_rho(rho0, V);
    if (empirical) {
      const Histogram h =
          empirical_invariant(net, counts0, theta0, V, burn_in, samples, thin, cfg.seed);
      write_artifact(cfg, "invariant_empirical.csv", histogram_csv(net, h));
      std::cout << "states=" << h.entries.size() << "\n";
      return 0;
    }
    const double E0V = E0V_opt >= 0.0
                           ? E0V_opt
                           : net.energies().dot(counts0.cast<double>()) / static_cast<double>(V) +
                                 net.heat_capacity() * theta0;
    const BirthDeathMeasure m = exact_invariant(net, V, E0V);
    std::string csv = "i,n_" + net.species()[m.species_a].name + ",probability\n";
    for (long long i = m.i_minus; i <= m.i_plus; ++i)
      csv += std::to_string(i) + "," + std::to_string(i) + "," +
             io::format_double(m.probability(i)) + "\n";
    write_artifact(cfg, "invariant_exact.csv", csv);
    if (!v_list_str.empty()) {
      std::vector<long long> volumes;
      std::size_t start = 0;
      while (start <= v_list_str.size()) {
        std::size_t comma = v_list_str.find(',', start);
        if (comma == std::string::npos) comma = v_list_str.size();
        volumes.push_back(std::stoll(v_list_str.substr(start, comma - start)));
        start = comma + 1;
      }
      const auto rows = ldp_rate_convergence(net, rho0, theta0, volumes, rate_target);
      write_artifact(cfg, "rate_convergence.csv", rate_convergence_csv(rows));
    }
    std::cout << "detailed-balance residual " << io::format_double(db_check(m, net, V, E0V))
              << "\n";
    return 0;
  }

  if (*c_qp) {
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, theta0);
    const auto pts = interior_grid(net, rho0, theta0, grid);
    std::string csv;
    for (const auto& s : net.species()) csv += s.name + ",";
    csv += "theta,value,grad_norm,hjb_residual\n";
    double worst = 0.0;
    for (const auto& rho : pts) {
      const double theta = temperature_from_energy(net, rho, qp.E0);
      const double v = value(qp, rho);
      const double gn = gradient(qp, rho).norm();
      const double hr = hjb_residual(qp, rho);
      worst = std::max(worst, std::abs(hr));
      for (Eigen::Index x = 0; x < net.n_species(); ++x) csv += io::format_double(rho(x)) + ",";
      csv += io::format_double(theta) + "," + io::format_double(v) + "," +
             io::format_double(gn) + "," + io::format_double(hr) + "\n";
    }
    write_artifact(cfg, "quasipotential.csv", csv);
    std::cout << "grid points " << pts.size() << ", max |hjb residual| "
              << io::format_double(worst) << "\n";
    return 0;
  }

  if (*c_ldp) {
    const Trajectory traj = trajectory_from_csv(net, read_file(traj_path));
    const PathCost cost = flux_traj ? path_rate_flux(net, traj, rho0)
                                    : path_rate_state(net, traj, rho0);
    nlohmann::json j;
    j["total"] = cost.total;
    j["intervals"] = cost.per_interval.size();
    write_artifact(cfg, "ldp_cost.json", io::dump_json(j));
    std::string csv = "t,integrand\n";
    for (const auto& [t, v] : cost.per_interval)
      csv += io::format_double(t) + "," + io::format_double(v) + "\n";
    write_artifact(cfg, "ldp_per_interval.csv", csv);
    std::cout << "path cost " << io::format_double(cost.total) << "\n";
    return 0;
  }

  if (*k_balance) {
    const BalanceReport rep = balance_report(net, rho0, tol_or(cfg, "balance", 1e-9));
    write_artifact(cfg, "balance.json", io::dump_json(to_json(rep, net)));
    std::cout << "idb=" << (rep.idb ? "true" : "false")
              << " icb=" << (rep.icb ? "true" : "false")
              << " wegscheider=" << (rep.wegscheider_ok ? "true" : "false") << "\n";
    return 0;
  }

  if (*k_hjb) {
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, theta0);
    double worst = 0.0;
    for (const auto& rho : interior_grid(net, rho0, theta0, grid))
      worst = std::max(worst, std::abs(hjb_residual(qp, rho)));
    std::cout << "max |hjb residual| " << io::format_double(worst) << "\n";
    return worst <= tol_or(cfg, "hjb", 1e-10) ? 0 : 2;
  }

  if (*k_om) {
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, theta0);
    RngStream rng(cfg.seed, 0);
    const auto pts = random_interior_points(net, rho0, theta0, N, rng);
    double worst = 0.0;
    for (const auto& rho : pts) {
      Vector c(net.n_pairs());
      for (Eigen::Index p = 0; p < net.n_pairs(); ++p) c(p) = 2.0 * rng.uniform() - 1.0;
      const Vector u = net.gamma_matrix() * c;
      const double resid = om_decomposition_residual(net, qp, rho, u);
      const double scale = std::max(1.0, std::abs(state_lagrangian(net, rho, qp.E0, u)));
      worst = std::max(worst, resid / scale);
    }
    std::cout << "max relative OM residual " << io::format_double(worst) << "\n";
    return worst <= tol_or(cfg, "om", 1e-8) ? 0 : 2;
  }

  if (*k_mft) {
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, theta0);
    IntegrateOptions opts;
    opts.steps = 2000;
    const Trajectory traj = integrate(net, State{rho0, theta0}, T, opts);
    const DecompositionReport rep = mft_path_report(net, qp, traj);
    write_artifact(cfg, "mft_report.json", io::dump_json(to_json(rep)));
    std::cout << "split residuals sym=" << io::format_double(rep.residuals.at("sym_split"))
              << " asym=" << io::format_double(rep.residuals.at("asym_split")) << "\n";
    return 0;
  }

  if (*k_orth) {
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, theta0);
    double worst = 0.0, worst_cross = 0.0;
    for (const auto& rho : interior_grid(net, rho0, theta0, grid)) {
      const auto [r1, r2] = orthogonality_residual(net, qp, rho);
      worst = std::max({worst, r1, r2});
      const LambdaTerms lt = lambda_terms(net, qp, rho);
      worst_cross =
          std::max({worst_cross, lt.cross_residual_sym_asym, lt.cross_residual_asym_sym});
    }
    std::cout << "max orthogonality residual " << io::format_double(worst)
              << ", max lambda cross residual " << io::format_double(worst_cross) << "\n";
    return std::max(worst, worst_cross) <= tol_or(cfg, "orthogonality", 1e-10) ? 0 : 2;
  }

  if (*k_boundary) {
    const nlohmann::json q = nlohmann::json::parse(read_file(query_path));
    BoundaryQuery query;
    query.boundary_point = Vector(net.n_species());
    query.direction = Vector(net.n_species());
    for (Eigen::Index x = 0; x < net.n_species(); ++x) {
      query.boundary_point(x) = q.at("boundary_point").at(x).get<double>();
      query.direction(x) = q.at("direction").at(x).get<double>();
    }
    query.reaction.pair = q.value("reaction", 0);
    query.reaction.backward = q.value("backward", false);
    if (q.contains("tau_grid")) query.tau_grid = q["tau_grid"].get<std::vector<double>>();
    const double E0 = total_energy(net, State{rho0, theta0});
    std::string csv = "tau,escape_integral\n";
    for (double tau : query.tau_grid)
      csv += io::format_double(tau) + "," + io::format_double(escape_integral(net, E0, query, tau)) +
             "\n";
    write_artifact(cfg, "boundary_table.csv", csv);
    const BoundaryVerdict verdict = classify_boundary(net, E0, query);
    std::cout << "verdict: " << to_string(verdict) << "\n";
    return 0;
  }

  if (*c_report) {
    ReportOptions ropts;
    ropts.grid_per_dim = grid;
    ropts.seed = cfg.seed;
    ropts.hjb_tol = tol_or(cfg, "hjb", ropts.hjb_tol);
    ropts.om_tol = tol_or(cfg, "om", ropts.om_tol);
    ropts.tr_tol = tol_or(cfg, "tr", ropts.tr_tol);
    ropts.orth_tol = tol_or(cfg, "orthogonality", ropts.orth_tol);
    const nlohmann::json rep = report(net, rho0, theta0, ropts);
    write_artifact(cfg, "report.json", io::dump_json(rep));
    for (const auto& [section, body] : rep.items()) {
      std::cout << section << ": ";
      if (body.contains("skipped"))
        std::cout << "skipped (" << body["skipped"].get<std::string>() << ")";
      else if (body.contains("pass"))
        std::cout << (body["pass"].get<bool>() ? "pass" : "FAIL");
      else
        std::cout << "ok";
      std::cout << "\n";
    }
    return 0;
  }

  return 1;
}

nlohmann::json error_json(const char* type, const std::string& message) {
  nlohmann::json j;
  j["error"]["type"] = type;
  j["error"]["message"] = message;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help
    std::cerr << io::dump_json(error_json("usage", e.what()));
    return 1;
  } catch (const convergence_error& e) {
    std::cerr << io::dump_json(error_json("convergence", e.what()));
    return 3;
  } catch (const inconclusive_error& e) {
    std::cerr << io::dump_json(error_json("inconclusive", e.what()));
    return 3;
  } catch (const error& e) {
    std::cerr << io::dump_json(error_json("validation", e.what()));
    return 2;
  } catch (const std::exception& e) {
    std::cerr << io::dump_json(error_json("internal", e.what()));
    return 3;
  }
}
