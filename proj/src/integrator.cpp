#include "peakon/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "peakon/errors.hpp"

namespace peakon {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
// Difference between the 5th and 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output (Hairer & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxGrowth = 10.0;
constexpr double kMaxShrink = 5.0;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::vector<double> DenseStep::value(double t) const {
  const std::size_t m = coeff[0].size();
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = value(t, i);
  return y;
}

double DenseStep::value(double t, std::size_t i) const {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  return coeff[0][i] + th * (coeff[1][i] + th1 * (coeff[2][i] + th * (coeff[3][i] + th1 * coeff[4][i])));
}

std::vector<double> DenseStep::derivative(double t) const {
  const std::size_t m = coeff[0].size();
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  std::vector<double> dy(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double A = coeff[3][i] + th1 * coeff[4][i];
    const double dA = -coeff[4][i];
    const double B = coeff[2][i] + th * A;
    const double dB = A + th * dA;
    const double C = coeff[1][i] + th1 * B;
    const double dC = -B + th1 * dB;
    dy[i] = (C + th * dC) / h;
  }
  return dy;
}

Dopri5::Dopri5(OdeRhs rhs, StepperConfig cfg, double t0, std::vector<double> y0)
    : rhs_(std::move(rhs)), cfg_(cfg), t_(t0), y_(std::move(y0)), k1_(y_.size()) {
  if (!(cfg_.rtol > 0.0 && cfg_.atol > 0.0 && cfg_.max_step > 0.0)) {
    throw InvalidArgument("integrator tolerances and max_step must be positive");
  }
  rhs_(t_, y_, k1_);
  h_ = initial_step();
}

double Dopri5::error_norm(std::span<const double> y0, std::span<const double> y1, std::span<const double> err) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    const double sk = cfg_.atol + cfg_.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sk;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

double Dopri5::initial_step() const {
  // Hairer's starting-step heuristic, first-derivative version.
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const double sk = cfg_.atol + cfg_.rtol * std::abs(y_[i]);
    dnf += (k1_[i] / sk) * (k1_[i] / sk);
    dny += (y_[i] / sk) * (y_[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  return std::min(h, cfg_.max_step);
}

Dopri5::Outcome Dopri5::step(double t_limit) {
  const std::size_t m = y_.size();
  std::vector<double> k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), yt(m), y1(m), err(m);

  while (true) {
    double h = std::min({h_, cfg_.max_step, t_limit - t_});
    const double h_min = cfg_.min_step_rel * std::max(1.0, std::abs(t_));
    if (!(h > h_min)) {
      // A step clipped only by t_limit is fine; anything else is underflow.
      if (t_limit - t_ > 0.0 && t_limit - t_ <= h_min && h_ > h_min) {
        h = t_limit - t_;
      } else {
        return Outcome::underflow;
      }
    }

    for (std::size_t i = 0; i < m; ++i) yt[i] = y_[i] + h * a21 * k1_[i];
    rhs_(t_ + c2 * h, yt, k2);
    for (std::size_t i = 0; i < m; ++i) yt[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
    rhs_(t_ + c3 * h, yt, k3);
    for (std::size_t i = 0; i < m; ++i) yt[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
    rhs_(t_ + c4 * h, yt, k4);
    for (std::size_t i = 0; i < m; ++i) {
      yt[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    rhs_(t_ + c5 * h, yt, k5);
    for (std::size_t i = 0; i < m; ++i) {
      yt[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    rhs_(t_ + h, yt, k6);
    for (std::size_t i = 0; i < m; ++i) {
      y1[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    rhs_(t_ + h, y1, k7);
    for (std::size_t i = 0; i < m; ++i) {
      err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    const double en = error_norm(y_, y1, err);
    if (!std::isfinite(en) || !all_finite(y1)) {
      // Blow-up inside the step: retry smaller before giving up.
      h_ = h / kMaxShrink;
      ++rejected_;
      if (!(h_ > h_min)) return all_finite(y_) ? Outcome::underflow : Outcome::non_finite;
      continue;
    }

    const double fac11 = std::pow(en, kExpo);
    if (en <= 1.0) {
      double fac = fac11 / std::pow(facold_, kBeta);
      fac = std::clamp(fac / kSafety, 1.0 / kMaxGrowth, kMaxShrink);
      facold_ = std::max(en, 1e-4);

      dense_.t0 = t_;
      dense_.h = h;
      for (auto& c : dense_.coeff) c.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double ydiff = y1[i] - y_[i];
        const double bspl = h * k1_[i] - ydiff;
        dense_.coeff[0][i] = y_[i];
        dense_.coeff[1][i] = ydiff;
        dense_.coeff[2][i] = bspl;
        dense_.coeff[3][i] = ydiff - h * k7[i] - bspl;
        dense_.coeff[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }

      t_ = (h == t_limit - t_) ? t_limit : t_ + h;
      y_.swap(y1);
      k1_.swap(k7);
      h_ = h / fac;
      ++accepted_;
      return Outcome::accepted;
    }
    h_ = h / std::min(kMaxShrink, fac11 / kSafety);
    ++rejected_;
  }
}

}  // namespace peakon
