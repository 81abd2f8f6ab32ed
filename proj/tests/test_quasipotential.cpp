#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <aniso/balance.hpp>
#include <aniso/quasipotential.hpp>

#include "fixtures.hpp"

using namespace aniso;
using Catch::Approx;

TEST_CASE("boltzmann_s cases") {
  CHECK(boltzmann_s(1.0, 1.0) == 0.0);
  CHECK(boltzmann_s(0.0, 0.7) == 0.7);
  CHECK(boltzmann_s(2.0, 1.0) == Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-14));
  CHECK(boltzmann_s(1.0, 0.0) == kInf);
  CHECK(boltzmann_s(0.0, 0.0) == 0.0);
}

TEST_CASE("relative_entropy componentwise sums and infinities") {
  CHECK(relative_entropy(fixtures::vec2(0.5, 0.5), fixtures::vec2(0.5, 0.5)) == 0.0);
  CHECK(relative_entropy(fixtures::vec2(0.0, 1.0), fixtures::vec2(0.5, 0.5)) ==
        Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(relative_entropy(fixtures::vec2(0.5, 0.5), fixtures::vec2(0.0, 1.0)) == kInf);
}

namespace {

Quasipotential net1_qp() {
  static const Network net = fixtures::net1();
  static const Quasipotential qp =
      make_quasipotential(net, fixtures::vec2(0.5, 0.5), fixtures::vec2(0.5, 0.5), 1.0);
  return qp;
}

}  // namespace

TEST_CASE("value vanishes at the minimiser and matches -C at pi") {
  const Network net = fixtures::net1();
  const Quasipotential qp = net1_qp();
  // At rho = pi the entropy vanishes and theta = 1, so value = -C.
  CHECK(value(qp, fixtures::vec2(0.5, 0.5)) == Approx(-qp.C).margin(1e-14));
  // The minimum over the class is 0 by construction of C.
  double min_seen = kInf;
  for (const auto& rho : interior_grid(net, fixtures::vec2(0.5, 0.5), 1.0, 201, 0.01))
    min_seen = std::min(min_seen, value(qp, rho));
  CHECK(min_seen >= -1e-10);
  CHECK(min_seen <= 1e-4);  // grid resolution around the minimiser
}

TEST_CASE("value respects the linear-in-energy lower bound on the grid") {
  const Network net = fixtures::net1();
  const Quasipotential qp = net1_qp();
  const double bound = (net.heat_capacity() - qp.E0) / net.boltzmann_constant() - qp.C;
  for (const auto& rho : interior_grid(net, fixtures::vec2(0.5, 0.5), 1.0, 50))
    CHECK(value(qp, rho) >= bound - 1e-12);
}

TEST_CASE("value is +inf outside the feasible temperature range") {
  const Quasipotential qp = net1_qp();
  CHECK(value(qp, fixtures::vec2(1.25, 0.0)) == kInf);  // e.rho = 2.5 = E0 -> theta = 0
  CHECK(value(qp, fixtures::vec2(-0.1, 0.5)) == kInf);
}

TEST_CASE("normalization_constant for decoupled energies") {
  // e = const: thermal term is fixed and entropy is minimised at pi itself,
  // so C = -(c_H/k_B) log theta0.
  const Network net = fixtures::net1_flat();
  const Vector rho0 = fixtures::vec2(0.5, 0.5);
  const double C = normalization_constant(net, rho0, rho0, 0.8);
  CHECK(C == Approx(-std::log(0.8)).epsilon(1e-10));

  // Recomputation from a different class representative agrees (convexity).
  const double C2 = normalization_constant(net, rho0, fixtures::vec2(0.2, 0.8), 0.8);
  CHECK(C2 == Approx(C).margin(1e-9));
}

TEST_CASE("gradient matches the closed form and finite differences") {
  const Network net = fixtures::net1();
  const Quasipotential qp = net1_qp();
  // At rho = pi: log term vanishes, gradient = e/(k_B theta) = (2, 1).
  const Vector g0 = gradient(qp, fixtures::vec2(0.5, 0.5));
  CHECK(g0(0) == Approx(2.0).epsilon(1e-12));
  CHECK(g0(1) == Approx(1.0).epsilon(1e-12));

  // Flat energies at rho = pi: only the thermal term e/(k_B theta) remains.
  const Network flat = fixtures::net1_flat();
  const Quasipotential qpf =
      make_quasipotential(flat, fixtures::vec2(0.5, 0.5), fixtures::vec2(0.5, 0.5), 1.0);
  const Vector gf = gradient(qpf, fixtures::vec2(0.5, 0.5));
  CHECK(gf(0) == Approx(1.0).epsilon(1e-12));
  CHECK(gf(1) == Approx(1.0).epsilon(1e-12));

  // Central differences on random interior points.
  RngStream rng(7, 0);
  for (const auto& rho :
       random_interior_points(net, fixtures::vec2(0.5, 0.5), 1.0, 20, rng)) {
    const Vector g = gradient(qp, rho);
    for (Eigen::Index x = 0; x < net.n_species(); ++x) {
      Vector hi = rho, lo = rho;
      const double h = 1e-6;
      hi(x) += h;
      lo(x) -= h;
      const double fd = (value(qp, hi) - value(qp, lo)) / (2 * h);
      CHECK(g(x) == Approx(fd).epsilon(1e-5).margin(1e-5));
    }
  }
  CHECK_THROWS_AS(gradient(qp, fixtures::vec2(0.0, 1.0)), boundary_error);
}

TEST_CASE("hamiltonian basics and the anchored identity") {
  const Network net = fixtures::net1();
  const Vector rho = fixtures::vec2(0.5, 0.5);
  CHECK(hamiltonian(net, rho, 2.5, Vector::Zero(2)) == 0.0);
  // xi = (2,1) is grad V at pi: 0.5 e^-1 (e^-1 - 1) + 0.5 e^-2 (e - 1) = 0.
  CHECK(hamiltonian(net, rho, 2.5, fixtures::vec2(2.0, 1.0)) == Approx(0.0).margin(1e-15));

  // Convexity in xi: midpoint inequality on random pairs.
  RngStream rng(11, 0);
  for (int i = 0; i < 50; ++i) {
    Vector a(2), b(2);
    for (int x = 0; x < 2; ++x) {
      a(x) = 4.0 * rng.uniform() - 2.0;
      b(x) = 4.0 * rng.uniform() - 2.0;
    }
    const double mid = hamiltonian(net, rho, 2.5, Vector(0.5 * (a + b)));
    const double avg = 0.5 * (hamiltonian(net, rho, 2.5, a) + hamiltonian(net, rho, 2.5, b));
    CHECK(mid <= avg + 1e-12);
  }
}

TEST_CASE("HJB residual vanishes for IDB and ICB-constant-a networks") {
  {
    const Network net = fixtures::net1();
    const Vector rho0 = fixtures::vec2(0.5, 0.5);
    const Quasipotential qp = make_quasipotential(net, fixtures::vec2(0.5, 0.5), rho0, 1.0);
    double worst = 0.0;
    for (const auto& rho : interior_grid(net, rho0, 1.0, 50))
      worst = std::max(worst, std::abs(hjb_residual(qp, rho)));
    CHECK(worst <= 1e-10);
  }
  {
    const Network net = fixtures::net2();
    const Vector rho0 = fixtures::vec3(1.0 / 3, 1.0 / 3, 1.0 / 3);
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, 1.0);
    double worst = 0.0;
    for (const auto& rho : interior_grid(net, rho0, 1.0, 50))
      worst = std::max(worst, std::abs(hjb_residual(qp, rho)));
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("HJB residual fails for ICB with non-constant transition energy") {
  const Network net = fixtures::net2_nonconst_a();
  const Vector rho0 = fixtures::vec3(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const Vector pi = isothermal_steady_state(net, rho0);
  const Quasipotential qp = make_quasipotential(net, pi, rho0, 1.0);
  double worst = 0.0;
  for (const auto& rho : interior_grid(net, rho0, 1.0, 50))
    worst = std::max(worst, std::abs(hjb_residual(qp, rho)));
  CHECK(worst > 1e-3);
}

TEST_CASE("theta^q plays no role in the HJB residual") {
  const Vector rho0 = fixtures::vec3(1.0 / 3, 1.0 / 3, 1.0 / 3);
  double worst = 0.0;
  for (double q : {-0.5, 0.0, 0.3, 1.0}) {
    const Network net({{"A", 0.5}, {"B", 0.3}, {"C", 0.2}},
                      fixtures::net2().reactions(), 1.0, q, 1.0);
    const Vector pi = isothermal_steady_state(net, rho0);
    const Quasipotential qp = make_quasipotential(net, pi, rho0, 1.0);
    for (const auto& rho : interior_grid(net, rho0, 1.0, 20))
      worst = std::max(worst, std::abs(hjb_residual(qp, rho)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("alternative quasipotential form via the steady state") {
  // V(rho) = [S(rho|pi) - S(rho_inf|pi)] - (c_H/k_B) log(theta/theta_inf):
  // the normalisation constant expressed through the minimiser.
  const Network net = fixtures::net1();
  const Vector rho0 = fixtures::vec2(0.5, 0.5);
  const Quasipotential qp = make_quasipotential(net, fixtures::vec2(0.5, 0.5), rho0, 1.0);
  const auto min_res = detail::minimize_entropy_on_class(net, qp.pi, rho0, qp.E0);
  const Vector rho_inf = min_res.rho;
  const double theta_inf = temperature_from_energy(net, rho_inf, qp.E0);

  for (const auto& rho : interior_grid(net, rho0, 1.0, 50)) {
    const double theta = temperature_from_energy(net, rho, qp.E0);
    const double alt = relative_entropy(rho, qp.pi) - relative_entropy(rho_inf, qp.pi) -
                       net.heat_capacity() / net.boltzmann_constant() *
                           std::log(theta / theta_inf);
    CHECK(value(qp, rho) == Approx(alt).margin(1e-9));
  }
}

TEST_CASE("value is convex along the class") {
  const Network net = fixtures::net1();
  const Quasipotential qp = net1_qp();
  RngStream rng(13, 0);
  const auto pts = random_interior_points(net, fixtures::vec2(0.5, 0.5), 1.0, 40, rng);
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double mid = value(qp, Vector(0.5 * (pts[i] + pts[i + 1])));
    CHECK(mid <= 0.5 * (value(qp, pts[i]) + value(qp, pts[i + 1])) + 1e-12);
  }
}

TEST_CASE("interior_grid honours margins and count") {
  const Network net = fixtures::net1();
  const auto pts = interior_grid(net, fixtures::vec2(0.5, 0.5), 1.0, 50);
  CHECK(pts.size() == 50);
  for (const auto& rho : pts) {
    CHECK(rho.minCoeff() >= 0.05 - 1e-12);
    CHECK(temperature_from_energy(net, rho, 2.5) >= 0.5 + 0.05 * (1.5 - 0.5) - 1e-12);
  }
}
