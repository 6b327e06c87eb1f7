#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "peakon/state.hpp"

namespace peakon {

/// Phase-space coordinate indices in the fixed order (q_1..q_n, p_1..p_n).
inline constexpr std::size_t q_index(std::size_t i) { return i; }
inline constexpr std::size_t p_index(std::size_t n, std::size_t i) { return n + i; }

/// Coefficients of a bivector at one phase-space point, as a 2n x 2n
/// antisymmetric array. Only the strict upper triangle is stored.
///
/// Wedge convention: d_a ^ d_b contributes +1 at (a, b) and -1 at (b, a).
/// Contraction with a covector is P(alpha, .)_b = sum_a alpha_a P(a, b), so
/// the canonical bivector sum_i d_{p_i} ^ d_{q_i} sends dH to Hamilton's
/// vector field (dH/dp, -dH/dq).
class BivectorValue {
 public:
  BivectorValue() = default;
  explicit BivectorValue(std::size_t n);

  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t dim() const noexcept { return 2 * n_; }

  [[nodiscard]] double operator()(std::size_t a, std::size_t b) const;
  /// Adds v * (d_a ^ d_b).
  void add_wedge(std::size_t a, std::size_t b, double v);
  void scale(double factor);
  void add_scaled(const BivectorValue& other, double factor);

  [[nodiscard]] Eigen::MatrixXd dense() const;

 private:
  [[nodiscard]] std::size_t slot(std::size_t a, std::size_t b) const;
  std::size_t n_ = 0;
  std::vector<double> upper_;
};

/// A bivector together with its coefficient derivatives at the same point:
/// gradient[i] holds d/dx_i of every coefficient.
struct BivectorField {
  BivectorValue value;
  std::vector<BivectorValue> gradient;
};

enum class Bivector { P0, P1 };

std::string to_string(Bivector b);

/// P_1 = sum_i d_{p_i} ^ d_{q_i}.
BivectorValue eval_P1(std::size_t n);

/// P_0 = sum_{i,j} p_i h_ij d_{p_i} ^ d_{q_j}
///       - sum_{i<j} sign(q_i - q_j) p_i p_j h_ij d_{p_i} ^ d_{p_j}
///       + sum_{i<j} sign(q_i - q_j) (h_ij - 1) d_{q_i} ^ d_{q_j}
/// with h_ij = exp(-|q_i - q_j|) and sign(0) = 0.
BivectorValue eval_P0(const PeakonState& state);

/// P_0 and its analytic coefficient derivatives.
BivectorField p0_field(const PeakonState& state);
/// P_1 with vanishing derivatives.
BivectorField p1_field(std::size_t n);
BivectorField field_of(Bivector which, const PeakonState& state);

/// a * P + b * R, values and derivatives alike.
BivectorField combine(double a, const BivectorField& P, double b, const BivectorField& R);

/// Central-difference coefficient derivatives of a bivector-valued function of
/// the state; step is `rel_step * max(1, |x_i|)`. Used as an oracle only.
std::vector<BivectorValue> fd_gradient(const std::function<BivectorValue(const PeakonState&)>& bivector,
                                       const PeakonState& state, double rel_step = 1e-6);

/// P(alpha, .). Throws InvalidArgument on a dimension mismatch.
std::vector<double> apply_bivector(const BivectorValue& P, std::span<const double> alpha);

/// S(alpha) = P_1^{-1}(P_0(alpha, .)), using P_1^{-1}(d_{q_i}) = dp_i and P_1^{-1}(d_{p_i}) = -dq_i.
std::vector<double> recursion_apply(const PeakonState& state, std::span<const double> alpha);

/// {f, g}_P = P(df, dg).
double poisson_bracket(const BivectorValue& P, std::span<const double> df, std::span<const double> dg);

/// Cyclic sum whose vanishing for every j < k < l is equivalent to [P, R]_SN = 0.
/// `scale` is the sum of absolute values of all contributing products.
struct SnResidual {
  double residual = 0.0;
  double scale = 0.0;
  [[nodiscard]] double scaled() const;
};

SnResidual sn_residual(const BivectorField& P, const BivectorField& R, std::array<std::size_t, 3> triple);

/// Minimum position gap accepted by the SN and Jacobi checks.
inline constexpr double kSignGuard = 1e-3;

/// Residual of the named pair at one triple (j < k < l) of coordinates, with
/// analytic derivatives. Throws DomainError when the state has a position gap
/// below kSignGuard and InvalidArgument for a malformed triple.
double sn_bracket_residual(Bivector P, Bivector R, const PeakonState& state, std::array<std::size_t, 3> triple);

/// Largest scaled residual over all coordinate triples.
double sn_max_scaled_residual(const BivectorField& P, const BivectorField& R);

/// {{x_a, x_b}, x_c} + cyclic for coordinate functions, with coefficient
/// derivatives taken from `gradient`.
double jacobiator(const BivectorValue& P, std::span<const BivectorValue> gradient, std::array<std::size_t, 3> triple);

struct SampleFailure {
  std::size_t sample = 0;
  double residual = 0.0;
  std::string detail;
};

struct VerificationReport {
  std::string check;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::vector<double> worst_q;
  std::vector<double> worst_p;
  std::string worst_detail;
  std::vector<SampleFailure> failures;
  std::vector<VerificationReport> components;

  /// Folds a component report into this one (max residual, pass flag, worst case).
  void absorb(const VerificationReport& component);
};

using BivectorFieldFn = std::function<BivectorField(const PeakonState&)>;

/// SN residuals of [P0,P0], [P0,P1], [P1,P1] over all triples plus the
/// identity P0(dH0, .) = P1(dH1, .), at `samples` random ordered states.
VerificationReport verify_structure(std::size_t n, std::size_t samples, std::uint64_t seed, double tol);
/// Same, with P0 supplied by the caller (used to confirm the check can fail).
VerificationReport verify_structure(std::size_t n, std::size_t samples, std::uint64_t seed, double tol,
                                    const BivectorFieldFn& p0);

/// ||S(dH_s) - dH_{s+1}||_inf / ||dH_{s+1}||_inf for s < s_max, and the
/// involution {H_i, H_j} under P0 and P1 for i, j <= s_max.
VerificationReport verify_recursion(std::size_t n, int s_max, std::size_t samples, std::uint64_t seed, double tol);

/// Only the involution part of verify_recursion.
VerificationReport verify_involution(std::size_t n, int s_max, std::size_t samples, std::uint64_t seed, double tol);

}  // namespace peakon
