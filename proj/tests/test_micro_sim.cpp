#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <aniso/macro.hpp>
#include <aniso/micro_sim.hpp>
#include <aniso/unimolecular.hpp>

#include "fixtures.hpp"

using namespace aniso;
using Catch::Approx;

namespace {

CountVector counts2(long long a, long long b) {
  CountVector c(2);
  c << a, b;
  return c;
}

}  // namespace

TEST_CASE("gillespie_step in the single-channel case") {
  const Network net = fixtures::net1();
  MicroState st = make_micro_state(net, counts2(1, 0), 1.0, 1);
  RngStream rng(1, 0);
  Event ev;
  // Only the forward A -> B channel is enabled (backward needs a B particle).
  REQUIRE(gillespie_step(net, st, rng, &ev) == StepOutcome::jumped);
  CHECK(st.counts(0) == 0);
  CHECK(st.counts(1) == 1);
  CHECK(ev.pair == 0);
  CHECK_FALSE(ev.backward);
  CHECK(st.flux_counts(0) == 1);
  // Heat release: theta increases by -e.gamma/(V c_H) = 1.
  CHECK(st.theta == Approx(2.0).margin(1e-15));
}

TEST_CASE("gillespie_step reports absorption when every rate vanishes") {
  // theta = 0 with positive barriers: cold death, no escape.
  const Network net = fixtures::net1();
  MicroState st = make_micro_state(net, counts2(3, 2), 0.0, 5);
  RngStream rng(1, 0);
  CHECK(gillespie_step(net, st, rng) == StepOutcome::absorbed);
}

TEST_CASE("per-jump energy conservation, exactly as the update rule") {
  const Network net = fixtures::net1();
  const long long V = 50;
  MicroState st = make_micro_state(net, counts2(25, 25), 1.0, V);
  RngStream rng(99, 0);
  const double E0 = net.energies().dot(st.counts.cast<double>()) / V +
                    net.heat_capacity() * st.theta;
  for (int i = 0; i < 20000; ++i) {
    if (gillespie_step(net, st, rng) == StepOutcome::absorbed) break;
    const double E = net.energies().dot(st.counts.cast<double>()) / V +
                     net.heat_capacity() * st.theta;
    REQUIRE(std::abs(E - E0) <= 1e-12 * (1.0 + std::abs(E0)));
    // The jump indicators keep both constraint families intact.
    REQUIRE(st.theta >= -1e-15);
    REQUIRE((st.counts.array() >= 0).all());
  }
}

TEST_CASE("continuity equation: counts = counts0 + Gamma flux, exactly") {
  const Network net = fixtures::net2();
  CountVector counts0(3);
  counts0 << 30, 20, 10;
  MicroState st = make_micro_state(net, counts0, 1.0, 60);
  RngStream rng(7, 0);
  for (int i = 0; i < 5000; ++i) {
    if (gillespie_step(net, st, rng) == StepOutcome::absorbed) break;
    CountVector expect = counts0;
    for (Eigen::Index p = 0; p < net.n_pairs(); ++p)
      expect += (net.gamma_pair(p).cast<long long>() * st.flux_counts(p)).eval();
    REQUIRE(st.counts == expect);
    REQUIRE((st.counts.array() >= 0).all());
  }
}

TEST_CASE("simulate_path is reproducible byte for byte") {
  const Network net = fixtures::net1();
  const PathResult a = simulate_path(net, counts2(20, 30), 1.0, 50, 3.0, 42, 0);
  const PathResult b = simulate_path(net, counts2(20, 30), 1.0, 50, 3.0, 42, 0);
  CHECK(event_log_csv(a.events) == event_log_csv(b.events));
  REQUIRE(a.events.size() == b.events.size());

  const PathResult c = simulate_path(net, counts2(20, 30), 1.0, 50, 3.0, 43, 0);
  CHECK(event_log_csv(a.events) != event_log_csv(c.events));
}

TEST_CASE("paths with no enabled reactions stay flat") {
  const Network net = fixtures::net1();
  const PathResult pr = simulate_path(net, counts2(4, 6), 0.0, 10, 2.0, 1, 0);
  CHECK(pr.absorbed);
  CHECK(pr.events.empty());
  REQUIRE(pr.trajectory.times.size() == 2);  // t = 0 and t = T
  CHECK(pr.trajectory.states.front().rho == pr.trajectory.states.back().rho);
}

TEST_CASE("Kurtz limit: SSA tracks the ODE at moderate volume") {
  const Network net = fixtures::net1();
  const double T = 2.0;
  IntegrateOptions opts;
  opts.steps = 4000;
  const Trajectory ode = integrate(net, {fixtures::vec2(0.5, 0.5), 1.0}, T, opts);

  const long long V = 20000;
  const PathResult pr = simulate_path(net, counts2(V / 2, V / 2), 1.0, V, T, 4242, 0);
  double sup = 0.0;
  for (std::size_t i = 0; i < pr.trajectory.times.size(); i += 7) {
    const double t = pr.trajectory.times[i];
    const std::size_t k = std::min<std::size_t>(
        static_cast<std::size_t>(t / T * (ode.times.size() - 1)), ode.times.size() - 1);
    sup = std::max(sup,
                   (pr.trajectory.states[i].rho - ode.states[k].rho).lpNorm<Eigen::Infinity>());
  }
  CHECK(sup <= 0.05);
}

TEST_CASE("ensemble summary is deterministic and thread-count independent") {
  const Network net = fixtures::net1();
  const EnsembleSummary a = ensemble(net, counts2(25, 25), 1.0, 50, 1.0, 16, 42, 21, 1);
  const EnsembleSummary b = ensemble(net, counts2(25, 25), 1.0, 50, 1.0, 16, 42, 21, 4);
  REQUIRE(a.terminal_flux.size() == b.terminal_flux.size());
  for (std::size_t i = 0; i < a.terminal_flux.size(); ++i)
    CHECK(a.terminal_flux[i] == b.terminal_flux[i]);
  CHECK(a.mean_rho == b.mean_rho);
  CHECK(a.var_theta == b.var_theta);
}

TEST_CASE("ensemble of one path equals that path") {
  const Network net = fixtures::net1();
  const EnsembleSummary s = ensemble(net, counts2(25, 25), 1.0, 50, 1.0, 1, 42, 11, 1);
  const PathResult pr = simulate_path(net, counts2(25, 25), 1.0, 50, 1.0, 42, 0);
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const State& ref = pr.trajectory.at(s.times[i]);
    CHECK((s.mean_rho.row(i).transpose() - ref.rho).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK(s.var_rho.row(i).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("ensemble variance scales like 1/V") {
  const Network net = fixtures::net1();
  const double T = 1.0;
  const long long N = 400;
  const EnsembleSummary s100 = ensemble(net, counts2(50, 50), 1.0, 100, T, N, 1234, 3, 2);
  const EnsembleSummary s1000 = ensemble(net, counts2(500, 500), 1.0, 1000, T, N, 1234, 3, 2);
  const double ratio = s100.var_rho(2, 0) / s1000.var_rho(2, 0);
  CHECK(ratio >= 6.0);
  CHECK(ratio <= 14.0);
}

TEST_CASE("mean terminal flux matches the ODE flux integral") {
  const Network net = fixtures::net1();
  const double T = 1.0;
  const long long N = 600, V = 400;
  const EnsembleSummary s = ensemble(net, counts2(V / 2, V / 2), 1.0, V, T, N, 777, 3, 2);
  IntegrateOptions opts;
  opts.steps = 4000;
  const Trajectory ode = integrate(net, {fixtures::vec2(0.5, 0.5), 1.0}, T, opts);

  Vector mean = Vector::Zero(net.n_pairs());
  for (const auto& w : s.terminal_flux) mean += w;
  mean /= static_cast<double>(N);
  Vector m2 = Vector::Zero(net.n_pairs());
  for (const auto& w : s.terminal_flux) m2 += (w - mean).cwiseAbs2();
  const double stderr_w = std::sqrt(m2(0) / static_cast<double>(N - 1) / static_cast<double>(N));

  CHECK(std::abs(mean(0) - ode.fluxes.back()(0)) <= 3.0 * stderr_w + 1e-4);
}

TEST_CASE("empirical invariant matches the exact A<=>B measure") {
  const Network net = fixtures::net1();
  const long long V = 50;
  const double E0V = 2.5;
  const BirthDeathMeasure exact = exact_invariant(net, V, E0V);
  const Histogram h = empirical_invariant(net, counts2(25, 25), 1.0, V, 20000, 400000, 1, 9);

  double prob_sum = 0.0;
  for (const auto& [key, p] : h.entries) prob_sum += p;
  CHECK(prob_sum == Approx(1.0).margin(1e-12));

  double tv = 0.0;
  for (long long i = 0; i <= V; ++i) {
    const double emp = h.probability({i, V - i});
    tv += 0.5 * std::abs(emp - exact.probability(i));
  }
  CHECK(tv <= 0.02);
}

TEST_CASE("empirical invariant of a frozen state is a point mass") {
  const Network net = fixtures::net1();
  const Histogram h = empirical_invariant(net, counts2(4, 6), 0.0, 10, 0, 100, 1, 5);
  REQUIRE(h.entries.size() == 1);
  CHECK(h.entries[0].second == 1.0);
}

TEST_CASE("empirical invariant refuses unbounded state spaces") {
  CountVector c0(1);
  c0 << 1;
  CHECK_THROWS_AS(
      empirical_invariant(fixtures::cell_division(), c0, 1.0, 10, 0, 100, 1, 5),
      unbounded_simplex_error);
}
