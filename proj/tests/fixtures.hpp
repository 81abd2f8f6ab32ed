#pragma once

#include <aniso/network.hpp>

namespace fixtures {

/// A <=> B with e = (2, 1), transition energy 3, unit rate constants,
/// c_H = 1, q = 0, k_B = 1. Isothermal detailed balance holds at pi = (.5, .5)
/// for unit-mass classes; theta in [0.5, 1.5] from rho0 = (.5, .5), theta0 = 1.
inline aniso::Network net1() {
  return aniso::Network({{"A", 2.0}, {"B", 1.0}},
                        {{{{{"A", 1}}}, {{{"B", 1}}}, 1.0, 1.0, 3.0}},
                        1.0, 0.0, 1.0);
}

/// Variant of net1 with equal energies: temperature decouples and the exact
/// invariant measure is Binomial(V, 1/2).
inline aniso::Network net1_flat() {
  return aniso::Network({{"A", 1.0}, {"B", 1.0}},
                        {{{{{"A", 1}}}, {{{"B", 1}}}, 1.0, 1.0, 2.0}},
                        1.0, 0.0, 1.0);
}

/// Driven triangle A -> B -> C -> A with forward-cycle rate 2 and backward 1:
/// complex-balanced (pi uniform) but not detailed-balanced (cycle affinity
/// log 8). Constant transition energy 1 keeps Prop-style identities valid.
inline aniso::Network net2() {
  return aniso::Network(
      {{"A", 0.5}, {"B", 0.3}, {"C", 0.2}},
      {{{{{"A", 1}}}, {{{"B", 1}}}, 2.0, 1.0, 1.0},
       {{{{"B", 1}}}, {{{"C", 1}}}, 2.0, 1.0, 1.0},
       {{{{"C", 1}}}, {{{"A", 1}}}, 2.0, 1.0, 1.0}},
      1.0, 0.0, 1.0);
}

/// net2 with non-constant transition energies: the HJB identity must fail.
inline aniso::Network net2_nonconst_a() {
  return aniso::Network(
      {{"A", 0.5}, {"B", 0.3}, {"C", 0.2}},
      {{{{{"A", 1}}}, {{{"B", 1}}}, 2.0, 1.0, 1.0},
       {{{{"B", 1}}}, {{{"C", 1}}}, 2.0, 1.0, 0.8},
       {{{{"C", 1}}}, {{{"A", 1}}}, 2.0, 1.0, 1.2}},
      1.0, 0.0, 1.0);
}

/// net2 with one rate constant perturbed. Note: every steady state of a
/// network whose complexes are all single species is complex-balanced (the
/// per-complex balance IS the steady-state equation), so this stays ICB.
inline aniso::Network net2_perturbed() {
  return aniso::Network(
      {{"A", 0.5}, {"B", 0.3}, {"C", 0.2}},
      {{{{{"A", 1}}}, {{{"B", 1}}}, 2.5, 1.0, 1.0},
       {{{{"B", 1}}}, {{{"C", 1}}}, 2.0, 1.0, 1.0},
       {{{{"C", 1}}}, {{{"A", 1}}}, 2.0, 1.0, 1.0}},
      1.0, 0.0, 1.0);
}

/// Deficiency-one bimolecular cycle 2A <=> A+B <=> 2B <=> 2A with generic
/// rate constants: its positive steady state is NOT complex-balanced, the
/// genuine negative control for ICB-gated identities.
inline aniso::Network deficiency_one() {
  return aniso::Network(
      {{"A", 0.4}, {"B", 0.2}},
      {{{{{"A", 2}}}, {{{"A", 1}, {"B", 1}}}, 1.3, 0.7, 1.0},
       {{{{"A", 1}, {"B", 1}}}, {{{"B", 2}}}, 0.9, 1.1, 1.0},
       {{{{"B", 2}}}, {{{"A", 2}}}, 0.8, 0.6, 1.0}},
      1.0, 0.0, 1.0);
}

/// Nonreversible cell division A -> 2A with zero energies: escapable boundary
/// at rho = 0, unbounded attainable set.
inline aniso::Network cell_division() {
  return aniso::Network({{"A", 0.0}},
                        {{{{{"A", 1}}}, {{{"A", 2}}}, 1.0, 0.0, 0.0}},
                        1.0, 0.0, 1.0);
}

/// Decay A -> 0 with e_A = 1 and transition energy 2 (barrier 1): Arrhenius
/// rates vanish exponentially toward theta = 0 and the boundary is trapped.
inline aniso::Network heating_room(double barrier = 1.0) {
  return aniso::Network({{"A", 1.0}},
                        {{{{{"A", 1}}}, {}, 1.0, 0.0, 1.0 + barrier}},
                        1.0, 0.0, 1.0);
}

inline aniso::Vector vec2(double a, double b) {
  aniso::Vector v(2);
  v << a, b;
  return v;
}

inline aniso::Vector vec3(double a, double b, double c) {
  aniso::Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace fixtures
