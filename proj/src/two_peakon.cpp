#include "peakon/two_peakon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "peakon/core.hpp"
#include "peakon/errors.hpp"
#include "peakon/parallel.hpp"

namespace peakon {

namespace {

// 2 - c^2 (1 + e^{-s}), written to stay accurate near |c| = 1.
double shell_factor(double s, double c) { return 2.0 * (1.0 - c * c) + c * c * -std::expm1(-s); }

void require_gap(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("gap must be positive and finite");
}

}  // namespace

bool will_collide_2peakon(const PeakonState& state) {
  if (state.size() != 2) throw InvalidArgument("two-peakon classifier needs exactly two peakons");
  const double h0 = momentum(state);
  return h0 * h0 < 2.0 * energy(state) && state.p(0) < 0.0 && state.p(1) > 0.0;
}

double h0_max(double s) {
  require_gap(s);
  return std::sqrt(2.0 / (1.0 + std::exp(-s)));
}

double reduced_gap_rate(double s, double c) {
  require_gap(s);
  const double a = shell_factor(s, c);
  if (a < 0.0) throw DomainError("(s, c) lies outside the unit-energy shell");
  return -std::sqrt(a * -std::expm1(-s));
}

double collision_time(double s0, double c) {
  require_gap(s0);
  if (std::abs(c) > 1.0) throw DomainError("|c| > 1: the gap never closes");
  if (std::abs(c) == 1.0) return std::numeric_limits<double>::infinity();
  // s = u^2 removes the 1/sqrt(s) endpoint singularity.
  const double limit0 = 2.0 / std::sqrt(2.0 * (1.0 - c * c));
  auto f = [c, limit0](double u) {
    if (u == 0.0) return limit0;
    const double s = u * u;
    return 2.0 * u / std::sqrt(shell_factor(s, c) * -std::expm1(-s));
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::sqrt(s0), 15, 1e-14, &err);
}

std::array<double, 2> v_c_field(double s, double c, Branch branch) {
  require_gap(s);
  const double a = shell_factor(s, c);
  if (a < 0.0) throw DomainError("(s, c) lies outside the unit-energy shell");
  const double along = (branch == Branch::plus ? c : -c) * (1.0 + std::exp(-s));
  const double across = std::sqrt(a * -std::expm1(-s));
  return {0.5 * (along - across), 0.5 * (along + across)};
}

std::array<double, 2> v_c_field_at(double q1, double q2, double c, Branch branch) {
  if (q1 > q2) return v_c_field(q1 - q2, c, branch);
  if (q1 == q2) throw DomainError("V_c is not defined on the diagonal");
  const auto v = v_c_field(q2 - q1, c, branch == Branch::plus ? Branch::minus : Branch::plus);
  return {v[1], v[0]};
}

PeakonState unit_energy_state(double s0, double c) {
  require_gap(s0);
  const double a = shell_factor(s0, c);
  if (a < 0.0) throw DomainError("(s0, c) lies outside the unit-energy shell");
  // p = g V_c^+ = (c -/+ sqrt(A / (1 - e^{-s}))) / 2.
  const double w = std::sqrt(a / -std::expm1(-s0));
  return PeakonState::ordered({0.5 * s0, -0.5 * s0}, {0.5 * (c - w), 0.5 * (c + w)});
}

VerificationReport verify_collision_classifier(const ClassifierSweep& sweep) {
  if (sweep.grid < 2) throw InvalidArgument("classifier grid needs at least 2 points per axis");
  require_gap(sweep.s0);
  IntegratorConfig cfg = sweep.integrator;
  cfg.record_integrals = false;

  const std::size_t m = sweep.grid;
  struct Outcome {
    bool skipped = false;
    bool predicted = false;
    bool simulated = false;
    std::string error;
  };
  std::vector<Outcome> out(m * m);
  auto value = [&](std::size_t i) { return -sweep.p_max + 2.0 * sweep.p_max * static_cast<double>(i) / static_cast<double>(m - 1); };
  auto state_of = [&](std::size_t idx) {
    return PeakonState::ordered({0.5 * sweep.s0, -0.5 * sweep.s0}, {value(idx / m), value(idx % m)});
  };

  parallel_for(m * m, [&](std::size_t idx) {
    Outcome& o = out[idx];
    const PeakonState st = state_of(idx);
    const double h0 = momentum(st);
    const double e2 = 2.0 * energy(st);
    if (!(e2 > 0.0) || std::abs(std::abs(h0) - std::sqrt(e2)) < sweep.band) {
      o.skipped = true;
      return;
    }
    o.predicted = will_collide_2peakon(st);
    // Time unit of the unit-energy problem is 1 / sqrt(2 energy).
    const double speed = std::sqrt(e2);
    double horizon = 40.0 / speed;
    const double cu = h0 / speed;
    if (std::abs(cu) < 1.0) horizon = std::max(horizon, 2.0 * collision_time(sweep.s0, cu) / speed);
    try {
      o.simulated = !integrate(st, horizon, cfg).events.empty();
    } catch (const PeakonError& e) {
      o.error = e.what();
    }
  });

  VerificationReport r;
  r.check = "collision2";
  r.tolerance = 0.5;
  std::size_t worst = 0;
  bool any = false;
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    const Outcome& o = out[idx];
    if (o.skipped) continue;
    ++r.samples;
    if (o.predicted == o.simulated && o.error.empty()) continue;
    r.max_residual += 1.0;
    r.pass = false;
    std::ostringstream os;
    os << "p=(" << value(idx / m) << "," << value(idx % m) << ") classifier=" << o.predicted
       << " simulation=" << o.simulated;
    if (!o.error.empty()) os << " error: " << o.error;
    if (r.failures.size() < 32) r.failures.push_back({idx, 1.0, os.str()});
    if (!any) {
      worst = idx;
      any = true;
      r.worst_detail = os.str();
    }
  }
  const PeakonState ws = state_of(worst);
  if (any) {
    r.worst_q.assign(ws.q().begin(), ws.q().end());
    r.worst_p.assign(ws.p().begin(), ws.p().end());
  }
  return r;
}

}  // namespace peakon
