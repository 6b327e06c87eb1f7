#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace peakon {

/// A point of the n-peakon phase space at time t.
///
/// Positions are kept strictly descending (q[0] > q[1] > ... > q[n-1]);
/// every closed-form expression in this library assumes that ordering.
/// Instances are only created through `validate_state` or `PeakonState::ordered`,
/// so the invariant holds for every value in circulation.
class PeakonState {
 public:
  PeakonState() = default;

  /// Builds a state from already ordered data; throws if the ordering is violated.
  static PeakonState ordered(std::vector<double> q, std::vector<double> p, double t = 0.0);

  [[nodiscard]] std::size_t size() const noexcept { return q_.size(); }
  [[nodiscard]] double time() const noexcept { return t_; }
  [[nodiscard]] std::span<const double> q() const noexcept { return q_; }
  [[nodiscard]] std::span<const double> p() const noexcept { return p_; }
  [[nodiscard]] double q(std::size_t i) const { return q_[i]; }
  [[nodiscard]] double p(std::size_t i) const { return p_[i]; }

  /// Permutation applied by `validate_state`: entry i is the input index now stored at i.
  [[nodiscard]] std::span<const std::size_t> permutation() const noexcept { return perm_; }

  /// Smallest gap q[k] - q[k+1]; +inf for a single peakon.
  [[nodiscard]] double min_gap() const noexcept;

  [[nodiscard]] PeakonState with_time(double t) const;
  [[nodiscard]] PeakonState with_momenta(std::vector<double> p) const;

 private:
  friend PeakonState validate_state(std::span<const double>, std::span<const double>, double);
  std::vector<double> q_;
  std::vector<double> p_;
  std::vector<std::size_t> perm_;
  double t_ = 0.0;
};

/// Sorts positions into descending order (carrying momenta along) and checks
/// that the configuration is regular. Throws InvalidArgument for empty,
/// mismatched or non-finite input and DegeneracyError for repeated positions.
PeakonState validate_state(std::span<const double> q, std::span<const double> p, double t = 0.0);

}  // namespace peakon
