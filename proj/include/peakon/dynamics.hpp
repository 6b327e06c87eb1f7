#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "peakon/first_integrals.hpp"
#include "peakon/integrator.hpp"
#include "peakon/state.hpp"

namespace peakon {

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.25;
  /// Accepted steps allowed per integrate() call, over all segments.
  std::uint64_t max_steps = 1'000'000;
  /// Position gap at which a shrinking pair is merged.
  double merge_gap = 1e-9;
  /// Pairs closer than this get their gap checked inside each step as well as at its end.
  double sign_guard = 1e-3;
  /// Samples with the colliding gap below this are kept in the event's approach history.
  double approach_window = 0.5;
  /// Largest time extrapolation from the merge gap to the collision; beyond it the
  /// approach is not of finite-time type and the merge happens in place.
  double max_extrapolation = 1e-2;
  /// Highest first integral recorded per sample; -1 records H_0..H_{n-1}.
  int max_recorded_order = -1;
  /// Orders whose evaluation touches more (I, rho) pairs than this are not recorded.
  std::uint64_t max_integral_terms = 200'000;
  bool record_integrals = true;
  Convention convention = Convention::theorem;

  /// Throws InvalidArgument unless all tolerances are positive and merge_gap >= 10 * atol.
  void validate() const;
};

/// (qdot, pdot) of the peakon system:
///   qdot_i = sum_j p_j e^{-|q_i-q_j|},  pdot_i = sum_j p_i p_j sign(q_i-q_j) e^{-|q_i-q_j|}.
struct PhaseVelocity {
  std::vector<double> qdot;
  std::vector<double> pdot;
};

PhaseVelocity rhs(const PeakonState& state);
/// Same field on a flat (q, p) vector; used by the integrator.
void rhs(std::span<const double> y, std::span<double> dydt);

/// psi_k = p_k + p_{k+1}, xi_k = sqrt(q_k - q_{k+1}) (p_k - p_{k+1}).
struct RegularizedCoords {
  double psi = 0.0;
  double xi = 0.0;
};

RegularizedCoords regularized_coords(const PeakonState& state, std::size_t k);

/// Replaces the pair (k, k+1) by one peakon at the midpoint carrying p_k + p_{k+1}.
/// Throws InvalidArgument if k is out of range or the gap exceeds max_gap.
PeakonState merge(const PeakonState& state, std::size_t k, double max_gap = 1e-9);

struct SplitState {
  PeakonState state;
  /// Splitting produces solutions that violate the Oleinik bound right after the split.
  bool dissipative = false;
};

/// Replaces peakon k by lambda * p_k at q_k + gap/2 and (1 - lambda) * p_k at q_k - gap/2.
SplitState split(const PeakonState& state, std::size_t k, double lambda, double gap);

struct ApproachSample {
  double t = 0.0;
  double gap = 0.0;
  double psi = 0.0;
  double xi = 0.0;
  double dp = 0.0;  // p_k - p_{k+1}
};

struct CollisionEvent {
  /// Time at which the gap reached merge_gap; pre_state is taken here.
  double t_event = 0.0;
  /// Collision time. Near a finite-time collision the gap closes like (t* - t)^2,
  /// so t* = t_event + 2 s / (-ds/dt); post_state is advanced to t*.
  double t_star = 0.0;
  std::size_t pair = 0;
  double gap_at_event = 0.0;
  /// psi_k carried into the merged peakon.
  double psi = 0.0;
  std::vector<ApproachSample> approach;
  PeakonState pre_state;
  PeakonState post_state;
  double energy_drop = 0.0;
};

struct TrajectorySample {
  PeakonState state;
  std::vector<double> integrals;
};

/// A stretch of the flow with a fixed number of peakons.
struct Segment {
  std::vector<TrajectorySample> samples;
  std::vector<DenseStep> steps;

  [[nodiscard]] std::size_t peakons() const { return samples.empty() ? 0 : samples.front().state.size(); }
  [[nodiscard]] double t_begin() const { return samples.front().state.time(); }
  [[nodiscard]] double t_end() const { return samples.back().state.time(); }
};

struct Trajectory {
  std::vector<Segment> segments;
  /// events[i] separates segments[i] and segments[i + 1].
  std::vector<CollisionEvent> events;

  [[nodiscard]] const PeakonState& final_state() const;
  /// Dense-output state at time t; throws DomainError outside the covered range.
  [[nodiscard]] PeakonState state_at(double t) const;
  /// Time derivative of the dense output at t (qdot, pdot), taken from the interpolant.
  [[nodiscard]] PhaseVelocity velocity_at(double t) const;
  [[nodiscard]] std::size_t sample_count() const;

 private:
  [[nodiscard]] const DenseStep& step_at(double t) const;
};

/// Integrates from `state` to t_end. When a pair's gap shrinks to merge_gap the
/// event time is located on the dense output, the pair is merged, and the
/// integration continues with one peakon fewer. Throws IntegrationError on
/// step-size underflow or non-finite values.
Trajectory integrate(const PeakonState& state, double t_end, const IntegratorConfig& cfg = {});

}  // namespace peakon
