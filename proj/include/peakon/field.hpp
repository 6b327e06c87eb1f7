#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "peakon/dynamics.hpp"
#include "peakon/state.hpp"

namespace peakon {

/// u(x) = sum_i p_i exp(-|x - q_i|).
double eval_u(const PeakonState& state, double x);

/// One-sided limits of u_x = -sum_i p_i exp(-|x - q_i|) sign(x - q_i).
/// They coincide off the peaks; at q_i, right - left = -2 p_i.
struct UxLimits {
  double left = 0.0;
  double right = 0.0;
  [[nodiscard]] double mean() const { return 0.5 * (left + right); }
};

UxLimits eval_ux(const PeakonState& state, double x);

struct WaveProfile {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> u;
  /// At a grid point that hits a peak exactly, the mean of the one-sided limits.
  std::vector<double> ux;
};

/// `points` equally spaced samples on [xmin, xmax]. Throws InvalidArgument for
/// points == 0, a non-finite range, or xmax < xmin (xmax == xmin needs points == 1).
WaveProfile sample_profile(const PeakonState& state, double xmin, double xmax, std::size_t points);

/// Integral of u^2 + u_x^2 over the line, summed pairwise from
/// int e^{-|x-a|} e^{-|x-b|} = (1 + d) e^{-d} and its sign-weighted
/// counterpart (1 - d) e^{-d}, d = |a - b|. Equals 4 * energy(state).
double h1_norm_sq(const PeakonState& state);

/// The same integral by adaptive Gauss-Kronrod quadrature between peaks and
/// on truncated tails. Used to check the closed form.
double h1_norm_sq_quadrature(const PeakonState& state);

/// Infimum and supremum of u_x over the line. Between consecutive peaks
/// u_x = a e^{tau} - b e^{-tau}, so the candidates are the one-sided limits at
/// the peaks, the interior critical point where e^{2 tau} = -b / a, and 0 at infinity.
struct UxExtrema {
  double inf = 0.0;
  double sup = 0.0;
};

UxExtrema ux_extrema(const PeakonState& state);

/// sup_x u_x, the quantity bounded by the Oleinik-type condition.
double oleinik_sup(const PeakonState& state);

struct StrongResidual {
  double max_abs = 0.0;
  double worst_x = 0.0;
  std::size_t evaluated = 0;
  /// Grid points closer than the margin to a peak; not evaluated.
  std::vector<double> skipped;
};

/// Pointwise residual of the equation in its nonlocal form
///   u_t + u u_x + d/dx (1/2 e^{-|x|} * (u^2 + u_x^2 / 2)) = 0,
/// which is equivalent to u_t - u_xxt + 3 u u_x - 2 u_x u_xx - u u_xxx = 0 for
/// smooth u. u_t comes from the time derivative of the trajectory's dense
/// output; the convolution is integrated numerically. Throws DomainError when
/// t is not covered by the trajectory.
StrongResidual strong_residual(const Trajectory& traj, double t, std::span<const double> grid,
                               double peak_margin = 1e-2);

}  // namespace peakon
