#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace peakon {

/// dy/dt = f(t, y), written into the output span.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct StepperConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.25;
  /// Steps below min_step_rel * max(1, |t|) count as underflow.
  double min_step_rel = 1e-15;
};

/// Continuous extension of one Dormand-Prince step on [t0, t0 + h].
struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<std::vector<double>, 5> coeff;

  [[nodiscard]] double t1() const noexcept { return t0 + h; }
  [[nodiscard]] std::vector<double> value(double t) const;
  [[nodiscard]] double value(double t, std::size_t component) const;
  /// Time derivative of the interpolant.
  [[nodiscard]] std::vector<double> derivative(double t) const;
};

/// Adaptive explicit Runge-Kutta 5(4) (Dormand-Prince) with PI step control
/// and 4th-order dense output.
class Dopri5 {
 public:
  Dopri5(OdeRhs rhs, StepperConfig cfg, double t0, std::vector<double> y0);

  enum class Outcome { accepted, underflow, non_finite };

  /// Attempts one accepted step that ends no later than t_limit. On failure
  /// the state is left at the last accepted point.
  Outcome step(double t_limit);

  [[nodiscard]] double t() const noexcept { return t_; }
  [[nodiscard]] const std::vector<double>& y() const noexcept { return y_; }
  [[nodiscard]] const DenseStep& last_step() const noexcept { return dense_; }
  [[nodiscard]] double next_step_size() const noexcept { return h_; }
  [[nodiscard]] std::size_t accepted_steps() const noexcept { return accepted_; }
  [[nodiscard]] std::size_t rejected_steps() const noexcept { return rejected_; }

 private:
  double initial_step() const;
  double error_norm(std::span<const double> y0, std::span<const double> y1, std::span<const double> err) const;

  OdeRhs rhs_;
  StepperConfig cfg_;
  double t_;
  std::vector<double> y_;
  std::vector<double> k1_;
  double h_ = 0.0;
  double facold_ = 1e-4;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  DenseStep dense_;
};

}  // namespace peakon
