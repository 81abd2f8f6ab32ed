#pragma once

#include <algorithm>
#include <map>
#include <thread>
#include <vector>

#include "aniso/kinetics.hpp"
#include "aniso/network.hpp"
#include "aniso/rng.hpp"
#include "aniso/trajectory.hpp"

namespace aniso {

/// State of the volume-V jump process. Temperature and counts are tied by
/// e.counts/V + c_H theta = E0 exactly, up to per-jump rounding; simulate_path
/// re-derives theta from the energy every 1e6 jumps to cancel drift.
struct MicroState {
  CountVector counts;
  double theta = 0.0;
  long long V = 1;
  double time = 0.0;
  CountVector flux_counts;  // net reaction counts per pair; w = flux_counts / V
};

struct Event {
  double time = 0.0;
  Eigen::Index pair = 0;
  bool backward = false;
};
using EventLog = std::vector<Event>;

enum class StepOutcome { jumped, absorbed, horizon };

/// One Gillespie step: exponential waiting time at the total jump rate, then a
/// channel chosen proportionally to its rate. Draw order is fixed (waiting
/// time first, channel second only if the jump lands before t_stop) as part of
/// the reproducibility contract.
inline StepOutcome gillespie_step(const Network& net, MicroState& st, RngStream& rng,
                                  Event* ev = nullptr, double t_stop = kInf) {
  const Eigen::Index P = net.n_pairs();
  Vector k(2 * P);
  for (Eigen::Index p = 0; p < P; ++p) {
    k(p) = micro_rate(net, st.counts, st.theta, st.V, fwd(p));
    k(p + P) = micro_rate(net, st.counts, st.theta, st.V, rev(p));
  }
  const double total_k = k.sum();
  if (total_k <= 0.0) return StepOutcome::absorbed;

  const double jump_rate = static_cast<double>(st.V) * total_k;
  const double t_next = st.time + rng.exponential(jump_rate);
  if (t_next > t_stop) {
    st.time = t_stop;
    return StepOutcome::horizon;
  }

  double u = rng.uniform() * total_k;
  Eigen::Index chosen = 0;
  for (; chosen < 2 * P - 1; ++chosen) {
    u -= k(chosen);
    if (u < 0.0) break;
  }
  const Direction d{chosen % P, chosen >= P};

  st.counts += (d.backward ? (-net.gamma_pair(d.pair)).eval() : net.gamma_pair(d.pair))
                   .cast<long long>();
  st.theta -= net.gamma_energy(d) / (static_cast<double>(st.V) * net.heat_capacity());
  st.flux_counts(d.pair) += d.backward ? -1 : 1;
  st.time = t_next;
  if (ev) *ev = {t_next, d.pair, d.backward};
  return StepOutcome::jumped;
}

struct PathResult {
  Trajectory trajectory;  // piecewise constant, includes t = 0 and t = T nodes
  EventLog events;
  bool absorbed = false;
};

inline MicroState make_micro_state(const Network& net, const CountVector& counts0, double theta0,
                                   long long V) {
  MicroState st;
  st.counts = counts0;
  st.theta = theta0;
  st.V = V;
  st.flux_counts = CountVector::Zero(net.n_pairs());
  return st;
}

/// Simulate one path of the jump process on [0, T]. Deterministic given
/// (seed, stream): same inputs give byte-identical event logs.
inline PathResult simulate_path(const Network& net, const CountVector& counts0, double theta0,
                                long long V, double T, std::uint64_t seed,
                                std::uint64_t stream = 0) {
  if (!(T > 0.0)) throw semantic_error("simulate_path: T must be positive");
  RngStream rng(seed, stream);
  MicroState st = make_micro_state(net, counts0, theta0, V);
  const double E0V =
      net.energies().dot(st.counts.cast<double>()) / static_cast<double>(V) +
      net.heat_capacity() * theta0;

  PathResult res;
  auto record = [&](double t) {
    res.trajectory.times.push_back(t);
    res.trajectory.states.push_back(
        {st.counts.cast<double>() / static_cast<double>(V), st.theta});
    res.trajectory.fluxes.push_back(st.flux_counts.cast<double>() / static_cast<double>(V));
  };
  record(0.0);

  long long jumps = 0;
  while (true) {
    Event ev;
    const StepOutcome out = gillespie_step(net, st, rng, &ev, T);
    if (out == StepOutcome::absorbed) {
      res.absorbed = true;
      break;
    }
    if (out == StepOutcome::horizon) break;
    res.events.push_back(ev);
    record(st.time);
    if (++jumps % 1000000 == 0) {
      st.theta = (E0V - net.energies().dot(st.counts.cast<double>()) / static_cast<double>(V)) /
                 net.heat_capacity();
    }
    if (st.time >= T) break;
  }
  if (res.trajectory.times.back() < T) {
    st.time = T;
    record(T);
  }
  return res;
}

/// `t,reaction_index,direction` CSV of an event log.
inline std::string event_log_csv(const EventLog& events) {
  std::string out = "t,reaction_index,direction\n";
  for (const auto& ev : events) {
    out += io::format_double(ev.time);
    out += "," + std::to_string(ev.pair);
    out += ev.backward ? ",bw\n" : ",fw\n";
  }
  return out;
}

struct EnsembleSummary {
  std::vector<double> times;
  Matrix mean_rho;   // n_times x n_species
  Matrix var_rho;    // unbiased across paths (zero for N = 1)
  Vector mean_theta;
  Vector var_theta;
  std::vector<Vector> terminal_flux;  // w(T) per path, in path order
  long long absorbed_paths = 0;
};

/// N independent paths with per-path RNG streams derived from one seed.
/// Path i always uses stream i, and the reduction runs in path order, so the
/// summary is independent of thread count and execution order.
inline EnsembleSummary ensemble(const Network& net, const CountVector& counts0, double theta0,
                                long long V, double T, long long N, std::uint64_t seed,
                                Eigen::Index n_out = 101, unsigned threads = 1) {
  if (N < 1) throw semantic_error("ensemble: N must be >= 1");
  const Eigen::Index X = net.n_species();
  EnsembleSummary sum;
  sum.times.resize(n_out);
  for (Eigen::Index i = 0; i < n_out; ++i)
    sum.times[i] = T * static_cast<double>(i) / static_cast<double>(n_out - 1);

  std::vector<Matrix> rho_samples(N);     // n_out x X each
  std::vector<Vector> theta_samples(N);   // n_out each
  sum.terminal_flux.resize(N);
  std::vector<char> absorbed(N, 0);

  auto run_range = [&](long long begin, long long end) {
    for (long long i = begin; i < end; ++i) {
      PathResult pr = simulate_path(net, counts0, theta0, V, T,
                                    seed, static_cast<std::uint64_t>(i));
      Matrix rs(n_out, X);
      Vector ts(n_out);
      for (Eigen::Index j = 0; j < n_out; ++j) {
        const State& s = pr.trajectory.at(sum.times[j]);
        rs.row(j) = s.rho.transpose();
        ts(j) = s.theta;
      }
      rho_samples[i] = std::move(rs);
      theta_samples[i] = std::move(ts);
      sum.terminal_flux[i] = pr.trajectory.fluxes.back();
      absorbed[i] = pr.absorbed ? 1 : 0;
    }
  };

  if (threads <= 1 || N == 1) {
    run_range(0, N);
  } else {
    const unsigned n_thr = std::min<unsigned>(threads, static_cast<unsigned>(N));
    std::vector<std::thread> pool;
    const long long chunk = (N + n_thr - 1) / n_thr;
    for (unsigned t = 0; t < n_thr; ++t) {
      const long long b = t * chunk;
      const long long e = std::min<long long>(N, b + chunk);
      if (b < e) pool.emplace_back(run_range, b, e);
    }
    for (auto& th : pool) th.join();
  }

  // Order-independent reduction: accumulate in path order.
  sum.mean_rho = Matrix::Zero(n_out, X);
  sum.var_rho = Matrix::Zero(n_out, X);
  sum.mean_theta = Vector::Zero(n_out);
  sum.var_theta = Vector::Zero(n_out);
  for (long long i = 0; i < N; ++i) {
    sum.mean_rho += rho_samples[i];
    sum.mean_theta += theta_samples[i];
    sum.absorbed_paths += absorbed[i];
  }
  sum.mean_rho /= static_cast<double>(N);
  sum.mean_theta /= static_cast<double>(N);
  if (N > 1) {
    for (long long i = 0; i < N; ++i) {
      sum.var_rho += (rho_samples[i] - sum.mean_rho).cwiseAbs2();
      sum.var_theta += (theta_samples[i] - sum.mean_theta).cwiseAbs2();
    }
    sum.var_rho /= static_cast<double>(N - 1);
    sum.var_theta /= static_cast<double>(N - 1);
  }
  return sum;
}

/// Occupation-time histogram over count vectors, entries sorted
/// lexicographically; probabilities sum to 1.
struct Histogram {
  std::vector<std::pair<std::vector<long long>, double>> entries;

  double probability(const std::vector<long long>& key) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), key,
                               [](const auto& e, const auto& k) { return e.first < k; });
    return (it != entries.end() && it->first == key) ? it->second : 0.0;
  }
};

/// Empirical invariant measure: after burn_in jumps, `samples` holding
/// intervals are recorded (every `thin`-th jump), each state weighted by its
/// holding time. Requires a bounded attainable set (finite state space).
inline Histogram empirical_invariant(const Network& net, const CountVector& counts0, double theta0,
                                     long long V, long long burn_in, long long samples,
                                     long long thin, std::uint64_t seed) {
  try {
    temperature_bounds(net, counts0.cast<double>() / static_cast<double>(V), theta0);
  } catch (const unbounded_simplex_error&) {
    throw unbounded_simplex_error("empirical_invariant: state space is unbounded");
  }
  if (thin < 1) thin = 1;

  RngStream rng(seed, 0);
  MicroState st = make_micro_state(net, counts0, theta0, V);
  const double E0V =
      net.energies().dot(st.counts.cast<double>()) / static_cast<double>(V) +
      net.heat_capacity() * theta0;

  for (long long i = 0; i < burn_in; ++i)
    if (gillespie_step(net, st, rng) == StepOutcome::absorbed) break;

  std::map<std::vector<long long>, double> weight;
  double total = 0.0;
  long long jumps = 0;
  for (long long s = 0; s < samples; ++s) {
    std::vector<long long> key(st.counts.data(), st.counts.data() + st.counts.size());
    const double t_before = st.time;
    if (gillespie_step(net, st, rng) == StepOutcome::absorbed) {
      weight[key] += 1.0;  // absorbing state carries the remaining mass
      total += 1.0;
      break;
    }
    weight[key] += st.time - t_before;
    total += st.time - t_before;
    for (long long skip = 1; skip < thin; ++skip)
      if (gillespie_step(net, st, rng) == StepOutcome::absorbed) break;
    if (++jumps % 1000000 == 0)
      st.theta = (E0V - net.energies().dot(st.counts.cast<double>()) / static_cast<double>(V)) /
                 net.heat_capacity();
  }

  Histogram h;
  h.entries.reserve(weight.size());
  for (const auto& [key, w] : weight) h.entries.emplace_back(key, w / total);
  return h;
}

/// `<n_species...>,probability` CSV of a histogram.
inline std::string histogram_csv(const Network& net, const Histogram& h) {
  std::string out;
  for (const auto& s : net.species()) out += "n_" + s.name + ",";
  out += "probability\n";
  for (const auto& [key, p] : h.entries) {
    for (long long n : key) out += std::to_string(n) + ",";
    out += io::format_double(p) + "\n";
  }
  return out;
}

}  // namespace aniso
