#pragma once

#include <array>
#include <cstddef>

#include "peakon/bihamiltonian.hpp"
#include "peakon/dynamics.hpp"
#include "peakon/state.hpp"

namespace peakon {

/// Collision test for two peakons (q_1 > q_2): true iff H_0^2 < 2 * energy and
/// p_1 < 0 < p_2. The first condition alone already forces p_1 p_2 < 0.
/// Throws InvalidArgument unless the state has exactly two peakons.
bool will_collide_2peakon(const PeakonState& state);

/// Largest |H_0| over momenta with p^T h p = 1 at gap s: sqrt(2 / (1 + e^{-s})).
double h0_max(double s);

/// ds/dt = -sqrt((2 - c^2 (1 + e^{-s})) (1 - e^{-s})) for p^T h p = 1 and H_0 = c,
/// on a collision-bound orbit. Throws DomainError for s <= 0 or outside the
/// reachable region c^2 (1 + e^{-s}) <= 2.
double reduced_gap_rate(double s, double c);

/// Time for the gap to close from s0 under reduced_gap_rate. Returns +infinity
/// for |c| = 1 (asymptotic approach); throws DomainError for |c| > 1 or s0 <= 0.
double collision_time(double s0, double c);

enum class Branch { plus, minus };

/// Velocity (qdot_1, qdot_2) of V_c^+ or V_c^- at gap s > 0: unit speed,
/// g(X, V) = +c or -c, and closing gap.
std::array<double, 2> v_c_field(double s, double c, Branch branch);

/// V_c^+/- at an arbitrary point off the diagonal. Below it the field is the
/// mirror image of the other branch, V_c^+(q_1, q_2) = V_c^-(q_2, q_1) with
/// components swapped.
std::array<double, 2> v_c_field_at(double q1, double q2, double c, Branch branch);

/// Two peakons at +/- s0/2 with p^T h p = 1 and H_0 = c, moving along V_c^+
/// (towards each other for |c| < 1).
PeakonState unit_energy_state(double s0, double c);

struct ClassifierSweep {
  std::size_t grid = 20;
  double p_max = 2.0;
  double s0 = 2.0;
  /// Grid points with | |H_0| - sqrt(2 energy) | below this are skipped.
  double band = 1e-3;
  IntegratorConfig integrator{};
};

/// Compares will_collide_2peakon with the event/no-event outcome of a full
/// simulation on a grid x grid lattice of (p_1, p_2) in [-p_max, p_max]^2.
/// max_residual counts disagreements.
VerificationReport verify_collision_classifier(const ClassifierSweep& sweep);

}  // namespace peakon
