#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "aniso/kinetics.hpp"
#include "aniso/network.hpp"
#include "aniso/rng.hpp"

namespace aniso {

/// Boltzmann function s(a|b) = a log(a/b) - a + b, extended to the boundary of
/// the quadrant: s(0|b) = b, s(a|0) = +inf for a > 0.
inline double boltzmann_s(double a, double b) {
  if (a < 0.0 || b < 0.0) return kInf;
  if (a == 0.0) return b;
  if (b == 0.0) return kInf;
  return a * std::log(a / b) - a + b;
}

/// Relative entropy S(rho | pi) = sum_x s(rho_x | pi_x).
inline double relative_entropy(const Vector& rho, const Vector& pi) {
  double total = 0.0;
  for (Eigen::Index x = 0; x < rho.size(); ++x) {
    const double s = boltzmann_s(rho(x), pi(x));
    if (s == kInf) return kInf;
    total += s;
  }
  return total;
}

namespace detail {

/// Strictly interior point of {rho0 + Ran Gamma, rho >= 0 [, theta >= 0]},
/// found by maximising the smallest slack with the simplex kernel.
/// Throws infeasible_error when no strictly interior point exists.
inline Vector interior_point(const Network& net, const Vector& rho0, std::optional<double> E0) {
  const Eigen::Index X = net.n_species();
  const Eigen::Index R = net.n_pairs();
  const Matrix& G = net.gamma_matrix();
  const Eigen::Index rows = X + (E0 ? 1 : 0);
  // Variables (w+, w-, t): maximize t with rho0 + Gamma w >= t 1 (and theta >= t).
  Matrix A(rows, 2 * R + 1);
  Vector b(rows);
  A.block(0, 0, X, R) = -G;
  A.block(0, R, X, R) = G;
  A.col(2 * R).head(X).setOnes();
  b.head(X) = rho0;
  if (E0) {
    A.row(X).head(R) = net.energies().transpose() * G;
    A.row(X).segment(R, R) = -A.row(X).head(R);
    A(X, 2 * R) = net.heat_capacity();
    b(X) = *E0 - net.energies().dot(rho0);
  }
  Vector c = Vector::Zero(2 * R + 1);
  c(2 * R) = 1.0;
  auto res = SimplexSolver::maximize(A, b, c);
  double slack = res.unbounded ? kInf : res.objective;
  if (!res.unbounded && slack <= 1e-12)
    throw infeasible_error("feasible set has empty interior");
  if (res.unbounded) {
    // Unbounded slack still yields a usable strictly interior point by refusing
    // huge steps: re-solve with t capped.
    Matrix A2(rows + 1, 2 * R + 1);
    A2.topRows(rows) = A;
    A2.row(rows).setZero();
    A2(rows, 2 * R) = 1.0;
    Vector b2(rows + 1);
    b2.head(rows) = b;
    b2(rows) = 1.0;
    res = SimplexSolver::maximize(A2, b2, c);
  }
  Vector w = res.x.head(R) - res.x.segment(R, R);
  return rho0 + G * w;
}

struct EntropyMinimum {
  Vector rho;
  double value = 0.0;
  Eigen::Index iterations = 0;
};

/// Projected Newton for the convex program
///   minimize  S(rho | pi) - (c_H / k_B) log theta(rho)   [thermal term iff E0]
///   over      rho in rho0 + Ran Gamma,  rho > 0  [, theta > 0]
/// parameterised on an orthonormal basis of Ran Gamma, with backtracking that
/// keeps the iterate strictly feasible.
inline EntropyMinimum minimize_entropy_on_class(const Network& net, const Vector& pi,
                                                const Vector& rho0, std::optional<double> E0,
                                                Eigen::Index max_iter = 200) {
  if ((pi.array() <= 0.0).any())
    throw infeasible_error("reference measure must be strictly positive");
  const Matrix B = linalg::range_basis(net.gamma_matrix());
  const Eigen::Index d = B.cols();
  const double cH = net.heat_capacity();
  const double kB = net.boltzmann_constant();
  const Vector& e = net.energies();

  auto theta_of = [&](const Vector& rho) { return E0 ? (*E0 - e.dot(rho)) / cH : 1.0; };
  auto objective = [&](const Vector& rho) {
    double f = relative_entropy(rho, pi);
    if (E0) f -= cH / kB * std::log(theta_of(rho));
    return f;
  };

  Vector rho = interior_point(net, rho0, E0);
  if (d == 0) return {rho, objective(rho), 0};

  double f = objective(rho);
  Eigen::Index tail_steps = 0;
  for (Eigen::Index iter = 0; iter < max_iter; ++iter) {
    const double theta = theta_of(rho);
    Vector grad_rho = (rho.array() / pi.array()).log().matrix();
    if (E0) grad_rho += e / (kB * theta);
    Vector g = B.transpose() * grad_rho;

    Matrix H = B.transpose() * rho.cwiseInverse().asDiagonal() * B;
    if (E0) {
      Vector Be = B.transpose() * e;
      H += Be * Be.transpose() / (kB * cH * theta * theta);
    }
    Vector step = H.llt().solve(-g);
    const double decrement = -g.dot(step);
    if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * (1.0 + std::abs(f)) || decrement <= 0.0)
      return {rho, f, iter};

    if (decrement <= 1e-16 * (1.0 + std::abs(f))) {
      // Quadratic tail: true decreases sit below objective roundoff, so the
      // Armijo test is blind here. Take damped-only-by-feasibility Newton
      // steps; a couple of them reach the gradient's floor.
      double t = 1.0;
      while (t > 1e-14) {
        Vector cand = rho + t * (B * step);
        if ((cand.array() > 0.0).all() && (!E0 || theta_of(cand) > 0.0)) {
          rho = std::move(cand);
          f = objective(rho);
          break;
        }
        t *= 0.5;
      }
      if (++tail_steps >= 4) return {rho, f, iter};
      continue;
    }

    double t = 1.0;
    bool moved = false;
    while (t > 1e-14) {
      Vector cand = rho + t * (B * step);
      if ((cand.array() > 0.0).all() && (!E0 || theta_of(cand) > 0.0)) {
        const double fc = objective(cand);
        if (fc <= f - 1e-4 * t * decrement) {
          rho = std::move(cand);
          f = fc;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) throw convergence_error("entropy minimization: line search failed");
  }
  throw convergence_error("entropy minimization: no convergence within iteration budget");
}

}  // namespace detail

/// Quasipotential V(rho) = S(rho|pi) - (c_H/k_B) log theta - C with theta pinned
/// by total energy E0; C normalises inf V = 0 over the attainable set.
struct Quasipotential {
  const Network* net = nullptr;
  Vector pi;
  double E0 = 0.0;
  double C = 0.0;
};

/// Constrained minimum of S(rho|pi) - (c_H/k_B) log theta over the attainable
/// set of (rho0, theta0): the normalisation constant of the quasipotential.
inline double normalization_constant(const Network& net, const Vector& pi, const Vector& rho0,
                                     double theta0) {
  const double E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  return detail::minimize_entropy_on_class(net, pi, rho0, E0).value;
}

inline Quasipotential make_quasipotential(const Network& net, const Vector& pi, const Vector& rho0,
                                          double theta0) {
  Quasipotential qp;
  qp.net = &net;
  qp.pi = pi;
  qp.E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  qp.C = normalization_constant(net, pi, rho0, theta0);
  return qp;
}

/// V(rho); +inf outside {rho >= 0, theta > 0} and wherever the entropy is +inf.
inline double value(const Quasipotential& qp, const Vector& rho) {
  const Network& net = *qp.net;
  if ((rho.array() < 0.0).any()) return kInf;
  const double theta = (qp.E0 - net.energies().dot(rho)) / net.heat_capacity();
  if (theta <= 0.0) return kInf;
  const double s = relative_entropy(rho, qp.pi);
  if (s == kInf) return kInf;
  return s - net.heat_capacity() / net.boltzmann_constant() * std::log(theta) - qp.C;
}

/// grad V(rho) = log(rho/pi) + e/(k_B theta) on the interior.
inline Vector gradient(const Quasipotential& qp, const Vector& rho) {
  const Network& net = *qp.net;
  if ((rho.array() <= 0.0).any())
    throw boundary_error("quasipotential gradient undefined at rho boundary");
  const double theta = (qp.E0 - net.energies().dot(rho)) / net.heat_capacity();
  if (theta <= 0.0) throw boundary_error("quasipotential gradient undefined at theta <= 0");
  return (rho.array() / qp.pi.array()).log().matrix() +
         net.energies() / (net.boltzmann_constant() * theta);
}

/// Hamiltonian H(rho, xi) = sum over all directed reactions of
/// k_r(rho) (e^{xi . gamma^r} - 1), rates closed at total energy E0.
inline double hamiltonian(const Network& net, const Vector& rho, double E0, const Vector& xi) {
  const RateVector k = directed_rates_closed(net, rho, E0);
  double h = 0.0;
  for (Eigen::Index p = 0; p < net.n_pairs(); ++p) {
    const double z = xi.dot(net.gamma(fwd(p)));
    const double kf = k.values(p);
    const double kb = k.values(p + net.n_pairs());
    if (kf > 0.0) h += kf * std::expm1(z);
    if (kb > 0.0) h += kb * std::expm1(-z);
  }
  return h;
}

/// HJB residual H(rho, grad V(rho)); vanishes under (IDB), or (ICB) with
/// constant transition energy.
inline double hjb_residual(const Quasipotential& qp, const Vector& rho) {
  return hamiltonian(*qp.net, rho, qp.E0, gradient(qp, rho));
}

namespace detail {

/// Bounding data of the attainable set in the coordinates of an orthonormal
/// basis of Ran Gamma, for grid generation and interior sampling.
struct ClassBox {
  Matrix basis;
  Vector lo, hi;        // per free dimension
  Vector rho_max;       // componentwise maxima over the set
  double theta_min = 0.0, theta_max = 0.0;
  double E0 = 0.0;

  bool interior_with_margin(const Network& net, const Vector& rho, double margin) const {
    const double theta = (E0 - net.energies().dot(rho)) / net.heat_capacity();
    if (!(theta > 0.0) || theta < theta_min + margin * (theta_max - theta_min)) return false;
    for (Eigen::Index x = 0; x < rho.size(); ++x)
      if (!(rho(x) > 0.0) || rho(x) < margin * rho_max(x)) return false;
    return true;
  }
};

inline ClassBox class_box(const Network& net, const Vector& rho0, double theta0) {
  ClassBox box;
  box.E0 = net.energies().dot(rho0) + net.heat_capacity() * theta0;
  box.basis = linalg::range_basis(net.gamma_matrix());
  const Eigen::Index d = box.basis.cols();
  box.lo.resize(d);
  box.hi.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    box.hi(i) =
        maximize_over_attainable(net, rho0, box.E0, box.basis.col(i)) - box.basis.col(i).dot(rho0);
    box.lo(i) = -(maximize_over_attainable(net, rho0, box.E0, Vector(-box.basis.col(i))) +
                  Vector(-box.basis.col(i)).dot(rho0));
  }
  box.rho_max.resize(net.n_species());
  for (Eigen::Index x = 0; x < net.n_species(); ++x)
    box.rho_max(x) = maximize_over_attainable(net, rho0, box.E0,
                                              Vector(Vector::Unit(net.n_species(), x)));
  const auto [tmin, tmax] = temperature_bounds(net, rho0, theta0);
  box.theta_min = tmin;
  box.theta_max = tmax;
  return box;
}

}  // namespace detail

/// Tensor grid over the interior of the attainable set, parameterised on an
/// orthonormal basis of Ran Gamma, n points per free dimension, keeping points
/// with relative margin from every face (concentration and temperature).
inline std::vector<Vector> interior_grid(const Network& net, const Vector& rho0, double theta0,
                                         Eigen::Index n_per_dim = 50, double margin = 0.05) {
  const detail::ClassBox box = detail::class_box(net, rho0, theta0);
  const Eigen::Index d = box.basis.cols();
  std::vector<Vector> points;
  if (d == 0) {
    points.push_back(rho0);
    return points;
  }

  std::vector<Eigen::Index> idx(d, 0);
  while (true) {
    Vector y(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double a = box.lo(i) + margin * (box.hi(i) - box.lo(i));
      const double b = box.hi(i) - margin * (box.hi(i) - box.lo(i));
      y(i) = n_per_dim == 1 ? 0.5 * (a + b)
                            : a + (b - a) * static_cast<double>(idx[i]) /
                                      static_cast<double>(n_per_dim - 1);
    }
    Vector rho = rho0 + box.basis * y;
    if (box.interior_with_margin(net, rho, margin)) points.push_back(std::move(rho));

    Eigen::Index i = 0;
    while (i < d && ++idx[i] == n_per_dim) idx[i++] = 0;
    if (i == d) break;
  }
  if (points.empty()) throw infeasible_error("interior grid is empty");
  return points;
}

/// Rejection-sampled interior points with the same margin rule as interior_grid.
inline std::vector<Vector> random_interior_points(const Network& net, const Vector& rho0,
                                                  double theta0, Eigen::Index n, RngStream& rng,
                                                  double margin = 0.05) {
  const detail::ClassBox box = detail::class_box(net, rho0, theta0);
  const Eigen::Index d = box.basis.cols();
  std::vector<Vector> points;
  if (d == 0) {
    for (Eigen::Index i = 0; i < n; ++i) points.push_back(rho0);
    return points;
  }
  long long attempts = 0;
  while (static_cast<Eigen::Index>(points.size()) < n) {
    if (++attempts > 10000LL * (n + 1))
      throw infeasible_error("random_interior_points: rejection sampling stalled");
    Vector y(d);
    for (Eigen::Index i = 0; i < d; ++i)
      y(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * rng.uniform();
    Vector rho = rho0 + box.basis * y;
    if (box.interior_with_margin(net, rho, margin)) points.push_back(std::move(rho));
  }
  return points;
}

}  // namespace aniso
