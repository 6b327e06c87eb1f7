#include "peakon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "peakon/core.hpp"
#include "peakon/errors.hpp"

namespace peakon {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

std::string describe(double t, std::span<const double> y) {
  const std::size_t n = y.size() / 2;
  std::ostringstream os;
  os.precision(17);
  os << "t=" << t << " q=[";
  for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << y[i];
  os << "] p=[";
  for (std::size_t i = 0; i < n; ++i) os << (i ? "," : "") << y[n + i];
  os << "]";
  return os.str();
}

std::vector<double> flatten(const PeakonState& s) {
  std::vector<double> y(s.q().begin(), s.q().end());
  y.insert(y.end(), s.p().begin(), s.p().end());
  return y;
}

PeakonState unflatten(std::span<const double> y, double t) {
  const std::size_t n = y.size() / 2;
  return PeakonState::ordered(std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n)),
                              std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(n), y.end()), t);
}

double gap_of(const DenseStep& d, double t, std::size_t k) { return d.value(t, k) - d.value(t, k + 1); }

int recorded_order(std::size_t n, const IntegratorConfig& cfg) {
  int top = static_cast<int>(n) - 1;
  if (cfg.max_recorded_order >= 0) top = std::min(top, cfg.max_recorded_order);
  while (top > 1 && term_count(n, top) > cfg.max_integral_terms) --top;
  return top;
}

TrajectorySample make_sample(PeakonState state, const IntegratorConfig& cfg) {
  TrajectorySample s{std::move(state), {}};
  if (!cfg.record_integrals) return s;
  const int top = recorded_order(s.state.size(), cfg);
  for (const auto& v : integral_table(top, s.state, cfg.convention)) s.integrals.push_back(v.value);
  return s;
}

ApproachSample approach_of(const PeakonState& s, std::size_t k) {
  const auto rc = regularized_coords(s, k);
  return {s.time(), s.q(k) - s.q(k + 1), rc.psi, rc.xi, s.p(k) - s.p(k + 1)};
}

// Lowest pair whose gap is at most eps and closing.
std::optional<std::size_t> closing_pair(const PeakonState& s, double eps) {
  if (s.size() < 2) return std::nullopt;
  const auto v = rhs(s);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    if (s.q(k) - s.q(k + 1) <= eps && v.qdot[k] - v.qdot[k + 1] < 0.0) return k;
  }
  return std::nullopt;
}

// Advances the merged state from t_event to t_event + dt by one explicit Euler
// step of the smooth quantities: the other peakons, the pair midpoint and psi.
PeakonState merge_ahead(const PeakonState& pre, std::size_t k, double dt) {
  const auto v = rhs(pre);
  const std::size_t n = pre.size();
  std::vector<double> q, p;
  q.reserve(n - 1);
  p.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == k) {
      q.push_back(0.5 * (pre.q(k) + pre.q(k + 1)) + dt * 0.5 * (v.qdot[k] + v.qdot[k + 1]));
      p.push_back(pre.p(k) + pre.p(k + 1) + dt * (v.pdot[k] + v.pdot[k + 1]));
      ++i;
    } else {
      q.push_back(pre.q(i) + dt * v.qdot[i]);
      p.push_back(pre.p(i) + dt * v.pdot[i]);
    }
  }
  // sum(pdot) = 0, so psi takes whatever rounding is left and H0 carries over exactly.
  double others = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (i != k) others += p[i];
  p[k] = momentum(pre) - others;
  return PeakonState::ordered(std::move(q), std::move(p), pre.time() + dt);
}

}  // namespace

void IntegratorConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(name) + " must be positive and finite");
  };
  positive(rtol, "rtol");
  positive(atol, "atol");
  positive(max_step, "max_step");
  positive(merge_gap, "merge_gap");
  positive(sign_guard, "sign_guard");
  positive(approach_window, "approach_window");
  if (!(max_extrapolation >= 0.0)) throw InvalidArgument("max_extrapolation must be non-negative");
  if (max_steps == 0) throw InvalidArgument("max_steps must be positive");
  if (merge_gap < 10.0 * atol) throw InvalidArgument("merge_gap must be at least 10 * atol");
}

PhaseVelocity rhs(const PeakonState& state) {
  const std::vector<double> y = flatten(state);
  std::vector<double> dy(y.size());
  rhs(y, dy);
  const auto n = static_cast<std::ptrdiff_t>(state.size());
  return {std::vector<double>(dy.begin(), dy.begin() + n), std::vector<double>(dy.begin() + n, dy.end())};
}

void rhs(std::span<const double> y, std::span<double> dydt) {
  const std::size_t n = y.size() / 2;
  const double* q = y.data();
  const double* p = y.data() + n;
  double* qd = dydt.data();
  double* pd = dydt.data() + n;
  for (std::size_t i = 0; i < n; ++i) {
    qd[i] = p[i];
    pd[i] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = q[i] - q[j];
      const double h = std::exp(-std::abs(d));
      qd[i] += p[j] * h;
      qd[j] += p[i] * h;
      const double f = p[i] * p[j] * sign(d) * h;
      pd[i] += f;
      pd[j] -= f;
    }
  }
}

RegularizedCoords regularized_coords(const PeakonState& state, std::size_t k) {
  if (k + 1 >= state.size()) throw InvalidArgument("pair index out of range");
  const double s = state.q(k) - state.q(k + 1);
  return {state.p(k) + state.p(k + 1), std::sqrt(s) * (state.p(k) - state.p(k + 1))};
}

PeakonState merge(const PeakonState& state, std::size_t k, double max_gap) {
  if (k + 1 >= state.size()) throw InvalidArgument("pair index out of range");
  const double s = state.q(k) - state.q(k + 1);
  if (s > max_gap) {
    std::ostringstream os;
    os << "gap " << s << " of pair " << k << " exceeds merge threshold " << max_gap;
    throw InvalidArgument(os.str());
  }
  return merge_ahead(state, k, 0.0);
}

SplitState split(const PeakonState& state, std::size_t k, double lambda, double gap) {
  if (k >= state.size()) throw InvalidArgument("peakon index out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in [0, 1]");
  if (!(gap > 0.0) || !std::isfinite(gap)) throw InvalidArgument("split gap must be positive");
  const double hi = state.q(k) + 0.5 * gap;
  const double lo = state.q(k) - 0.5 * gap;
  if ((k > 0 && !(hi < state.q(k - 1))) || (k + 1 < state.size() && !(lo > state.q(k + 1))) || !(hi > lo)) {
    throw InvalidArgument("split gap violates the ordering");
  }
  std::vector<double> q, p;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i == k) {
      q.push_back(hi);
      p.push_back(lambda * state.p(k));
      q.push_back(lo);
      p.push_back(state.p(k) - lambda * state.p(k));
    } else {
      q.push_back(state.q(i));
      p.push_back(state.p(i));
    }
  }
  return {PeakonState::ordered(std::move(q), std::move(p), state.time()), false};
}

const PeakonState& Trajectory::final_state() const { return segments.back().samples.back().state; }

std::size_t Trajectory::sample_count() const {
  std::size_t c = 0;
  for (const auto& s : segments) c += s.samples.size();
  return c;
}

const DenseStep& Trajectory::step_at(double t) const {
  for (const auto& seg : segments) {
    if (seg.steps.empty() || t < seg.t_begin() || t > seg.t_end()) continue;
    auto it = std::lower_bound(seg.steps.begin(), seg.steps.end(), t,
                               [](const DenseStep& d, double x) { return d.t1() < x; });
    if (it == seg.steps.end()) --it;
    return *it;
  }
  std::ostringstream os;
  os << "time " << t << " is not covered by the trajectory";
  throw DomainError(os.str());
}

PeakonState Trajectory::state_at(double t) const {
  for (const auto& seg : segments) {
    if (seg.steps.empty() && !seg.samples.empty() && t == seg.t_begin()) return seg.samples.front().state;
  }
  return unflatten(step_at(t).value(t), t);
}

PhaseVelocity Trajectory::velocity_at(double t) const {
  const auto dy = step_at(t).derivative(t);
  const auto n = static_cast<std::ptrdiff_t>(dy.size() / 2);
  return {std::vector<double>(dy.begin(), dy.begin() + n), std::vector<double>(dy.begin() + n, dy.end())};
}

Trajectory integrate(const PeakonState& initial, double t_end, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(t_end) || t_end < initial.time()) throw InvalidArgument("t_end must be finite and >= the start time");

  Trajectory traj;
  PeakonState current = initial;
  std::uint64_t steps_taken = 0;
  const StepperConfig scfg{cfg.rtol, cfg.atol, cfg.max_step};

  // Merges pairs already closing below the threshold, each as its own event.
  auto merge_pending = [&](Segment&& seg, PeakonState state, std::vector<std::vector<ApproachSample>>* hist) {
    traj.segments.push_back(std::move(seg));
    bool first = true;
    while (auto k = closing_pair(state, cfg.merge_gap)) {
      CollisionEvent ev;
      ev.t_event = state.time();
      ev.pair = *k;
      ev.gap_at_event = state.q(*k) - state.q(*k + 1);
      ev.pre_state = state;
      if (hist && first) {
        ev.approach = std::move((*hist)[*k]);
        ev.approach.push_back(approach_of(state, *k));
      }
      double dt = 0.0;
      const bool alone = [&] {
        const PeakonState rest = merge_ahead(state, *k, 0.0);
        return !closing_pair(rest, cfg.merge_gap).has_value();
      }();
      if (alone) {
        const auto v = rhs(state);
        const double rate = v.qdot[*k] - v.qdot[*k + 1];
        const double guess = 2.0 * ev.gap_at_event / -rate;
        if (std::isfinite(guess) && guess >= 0.0 && guess <= cfg.max_extrapolation) dt = guess;
      }
      ev.post_state = merge_ahead(state, *k, dt);
      ev.t_star = ev.post_state.time();
      ev.psi = ev.post_state.p(*k);
      ev.energy_drop = energy(ev.pre_state) - energy(ev.post_state);
      state = ev.post_state;
      traj.events.push_back(std::move(ev));
      first = false;
      if (closing_pair(state, cfg.merge_gap)) {
        Segment mid;
        mid.samples.push_back(make_sample(state, cfg));
        traj.segments.push_back(std::move(mid));
      }
    }
    return state;
  };

  // Pairs already closing at the start merge before any step is taken.
  if (closing_pair(current, cfg.merge_gap)) {
    Segment seg;
    seg.samples.push_back(make_sample(current, cfg));
    current = merge_pending(std::move(seg), current, nullptr);
  }

  for (;;) {
    const std::size_t n = current.size();
    Segment seg;
    seg.samples.push_back(make_sample(current, cfg));
    std::vector<std::vector<ApproachSample>> history(n > 0 ? n - 1 : 0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (current.q(k) - current.q(k + 1) < cfg.approach_window) history[k].push_back(approach_of(current, k));
    }
    if (current.time() >= t_end) {
      traj.segments.push_back(std::move(seg));
      break;
    }

    Dopri5 stepper([](double, std::span<const double> y, std::span<double> dy) { rhs(y, dy); }, scfg, current.time(),
                   flatten(current));
    bool merged = false;
    while (stepper.t() < t_end) {
      const auto outcome = stepper.step(t_end);
      if (outcome != Dopri5::Outcome::accepted) {
        throw IntegrationError(std::string(outcome == Dopri5::Outcome::underflow ? "step size underflow"
                                                                                 : "non-finite values")
                               + " at " + describe(stepper.t(), stepper.y()));
      }
      if (++steps_taken > cfg.max_steps) {
        throw IntegrationError("step budget of " + std::to_string(cfg.max_steps) + " exceeded at " +
                               describe(stepper.t(), stepper.y()));
      }
      const DenseStep& d = stepper.last_step();
      seg.steps.push_back(d);

      // Earliest downward crossing of merge_gap among all pairs.
      double t_hit = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const double g0 = gap_of(d, d.t0, k);
        const double g1 = gap_of(d, d.t1(), k);
        if (g0 <= cfg.merge_gap) continue;
        const int m = std::min(g0, g1) < cfg.sign_guard ? 16 : 1;
        double ta = d.t0;
        for (int j = 1; j <= m; ++j) {
          const double tb = j == m ? d.t1() : d.t0 + d.h * j / m;
          if (gap_of(d, tb, k) <= cfg.merge_gap) {
            double lo = ta, hi = tb;
            while (hi - lo > cfg.atol) {
              const double mid = 0.5 * (lo + hi);
              if (mid <= lo || mid >= hi) break;
              (gap_of(d, mid, k) <= cfg.merge_gap ? hi : lo) = mid;
            }
            t_hit = std::min(t_hit, hi);
            break;
          }
          ta = tb;
        }
      }

      if (std::isfinite(t_hit)) {
        const PeakonState pre = unflatten(d.value(t_hit), t_hit);
        if (closing_pair(pre, cfg.merge_gap)) {
          seg.samples.push_back(make_sample(pre, cfg));
          current = merge_pending(std::move(seg), pre, &history);
          merged = true;
          break;
        }
        // Otherwise the gap only touched the threshold and is opening again.
      }

      const PeakonState now = unflatten(stepper.y(), stepper.t());
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (now.q(k) - now.q(k + 1) < cfg.approach_window) history[k].push_back(approach_of(now, k));
      }
      seg.samples.push_back(make_sample(now, cfg));
    }
    if (!merged) {
      traj.segments.push_back(std::move(seg));
      break;
    }
  }
  return traj;
}

}  // namespace peakon
