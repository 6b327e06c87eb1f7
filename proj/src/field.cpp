#include "peakon/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "peakon/errors.hpp"

namespace peakon {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kTail = 40.0;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Smooth part of u_x at x, leaving out the peak sitting exactly at x (if any).
double ux_smooth(std::span<const double> q, std::span<const double> p, double x, double& at_peak) {
  double s = 0.0;
  at_peak = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (x == q[i]) {
      at_peak += p[i];
      continue;
    }
    s -= p[i] * std::exp(-std::abs(x - q[i])) * sign(x - q[i]);
  }
  return s;
}

double integrate_piece(const auto& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

// Breakpoints for piecewise-smooth integrands: truncated tails plus every peak.
std::vector<double> breakpoints(const PeakonState& state) {
  std::vector<double> b(state.q().rbegin(), state.q().rend());
  b.insert(b.begin(), b.front() - kTail);
  b.push_back(b.back() + kTail);
  return b;
}

}  // namespace

double eval_u(const PeakonState& state, double x) {
  double u = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) u += state.p(i) * std::exp(-std::abs(x - state.q(i)));
  return u;
}

UxLimits eval_ux(const PeakonState& state, double x) {
  double jump = 0.0;
  const double s = ux_smooth(state.q(), state.p(), x, jump);
  return {s + jump, s - jump};
}

WaveProfile sample_profile(const PeakonState& state, double xmin, double xmax, std::size_t points) {
  if (points == 0) throw InvalidArgument("profile needs at least one point");
  if (!std::isfinite(xmin) || !std::isfinite(xmax) || xmax < xmin) throw InvalidArgument("invalid profile range");
  if (xmax == xmin && points != 1) throw InvalidArgument("empty profile range");
  WaveProfile w;
  w.t = state.time();
  w.x.resize(points);
  w.u.resize(points);
  w.ux.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = points == 1 ? xmin : xmin + (xmax - xmin) * static_cast<double>(i) / static_cast<double>(points - 1);
    w.x[i] = x;
    w.u[i] = eval_u(state, x);
    w.ux[i] = eval_ux(state, x).mean();
  }
  return w;
}

double h1_norm_sq(const PeakonState& state) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    for (std::size_t j = 0; j < state.size(); ++j) {
      const double d = std::abs(state.q(i) - state.q(j));
      const double e = std::exp(-d);
      total += state.p(i) * state.p(j) * ((1.0 + d) * e + (1.0 - d) * e);
    }
  }
  return total;
}

double h1_norm_sq_quadrature(const PeakonState& state) {
  auto f = [&](double x) {
    const double u = eval_u(state, x);
    const double ux = eval_ux(state, x).mean();
    return u * u + ux * ux;
  };
  const auto b = breakpoints(state);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) total += integrate_piece(f, b[i], b[i + 1]);
  return total;
}

UxExtrema ux_extrema(const PeakonState& state) {
  const std::size_t n = state.size();
  UxExtrema r;  // 0 is the limit at both infinities
  auto take = [&r](double v) {
    r.inf = std::min(r.inf, v);
    r.sup = std::max(r.sup, v);
  };
  for (std::size_t k = 0; k < n; ++k) {
    const auto lim = eval_ux(state, state.q(k));
    take(lim.left);
    take(lim.right);
  }
  // Interior of (q_{k+1}, q_k), tau = x - q_{k+1}.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double x0 = state.q(k + 1);
    const double len = state.q(k) - x0;
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i <= k; ++i) a += state.p(i) * std::exp(-(state.q(i) - x0));
    for (std::size_t i = k + 1; i < n; ++i) b += state.p(i) * std::exp(-(x0 - state.q(i)));
    if (!(a * b < 0.0)) continue;
    const double tau = 0.5 * std::log(-b / a);
    if (tau > 0.0 && tau < len) take(a * std::exp(tau) - b * std::exp(-tau));
  }
  return r;
}

double oleinik_sup(const PeakonState& state) { return ux_extrema(state).sup; }

StrongResidual strong_residual(const Trajectory& traj, double t, std::span<const double> grid, double peak_margin) {
  const PeakonState state = traj.state_at(t);
  const PhaseVelocity v = traj.velocity_at(t);
  const std::size_t n = state.size();
  auto f = [&](double y) {
    const double u = eval_u(state, y);
    const double ux = eval_ux(state, y).mean();
    return u * u + 0.5 * ux * ux;
  };
  const auto b = breakpoints(state);

  StrongResidual r;
  for (const double x : grid) {
    bool near = false;
    for (std::size_t i = 0; i < n; ++i) near = near || std::abs(x - state.q(i)) < peak_margin;
    if (near) {
      r.skipped.push_back(x);
      continue;
    }
    double ut = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-std::abs(x - state.q(i)));
      ut += v.pdot[i] * e + state.p(i) * v.qdot[i] * sign(x - state.q(i)) * e;
    }
    const double u = eval_u(state, x);
    const double ux = eval_ux(state, x).mean();
    // d/dx of (1/2) int e^{-|x-y|} f(y) dy, split at x and at the peaks.
    auto kernel = [&](double y) { return -0.5 * sign(x - y) * std::exp(-std::abs(x - y)) * f(y); };
    double px = 0.0;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
      const double lo = b[i], hi = b[i + 1];
      if (x > lo && x < hi) {
        px += integrate_piece(kernel, lo, x) + integrate_piece(kernel, x, hi);
      } else {
        px += integrate_piece(kernel, lo, hi);
      }
    }
    const double res = std::abs(ut + u * ux + px);
    ++r.evaluated;
    if (res > r.max_abs || std::isnan(res)) {
      r.max_abs = std::isnan(res) ? std::numeric_limits<double>::infinity() : res;
      r.worst_x = x;
    }
  }
  return r;
}

}  // namespace peakon
