#include "peakon/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "peakon/errors.hpp"

namespace peakon {

namespace {

void check_finite(std::span<const double> v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw InvalidArgument(std::string("non-finite ") + name + "[" + std::to_string(i) + "]");
    }
  }
}

}  // namespace

PeakonState validate_state(std::span<const double> q, std::span<const double> p, double t) {
  if (q.empty()) throw InvalidArgument("a state needs at least one peakon");
  if (q.size() != p.size()) {
    throw InvalidArgument("positions and momenta differ in length (" + std::to_string(q.size()) +
                          " vs " + std::to_string(p.size()) + ")");
  }
  check_finite(q, "q");
  check_finite(p, "p");
  if (!std::isfinite(t)) throw InvalidArgument("non-finite time");

  const std::size_t n = q.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });

  PeakonState s;
  s.q_.resize(n);
  s.p_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.q_[i] = q[perm[i]];
    s.p_[i] = p[perm[i]];
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(s.q_[i] > s.q_[i + 1])) {
      throw DegeneracyError("singular configuration: peakons " + std::to_string(perm[i]) + " and " +
                            std::to_string(perm[i + 1]) + " share position " + std::to_string(s.q_[i]));
    }
  }
  s.perm_ = std::move(perm);
  s.t_ = t;
  return s;
}

PeakonState PeakonState::ordered(std::vector<double> q, std::vector<double> p, double t) {
  PeakonState s = validate_state(q, p, t);
  for (std::size_t i = 0; i < s.perm_.size(); ++i) {
    if (s.perm_[i] != i) throw InvalidArgument("positions are not strictly descending");
  }
  return s;
}

double PeakonState::min_gap() const noexcept {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < q_.size(); ++i) g = std::min(g, q_[i] - q_[i + 1]);
  return g;
}

PeakonState PeakonState::with_time(double t) const {
  PeakonState s = *this;
  s.t_ = t;
  return s;
}

PeakonState PeakonState::with_momenta(std::vector<double> p) const {
  if (p.size() != p_.size()) throw InvalidArgument("momentum vector has wrong length");
  check_finite(p, "p");
  PeakonState s = *this;
  s.p_ = std::move(p);
  return s;
}

}  // namespace peakon
