#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "peakon/state.hpp"

namespace peakon {

/// A non-decreasing tuple (i_0 <= ... <= i_s) of 0-based peakon indices,
/// with I! = product of the factorials of its run lengths.
struct MultiIndex {
  std::vector<std::uint32_t> entries;
  std::uint64_t factorial_weight = 1;
};

/// A map rho : {1..s} -> {0..s-1} with rho(j) < j, stored as values[j-1],
/// together with its integer coefficient c_rho.
struct RhoMap {
  std::vector<std::uint32_t> values;
  std::uint64_t coefficient = 0;
};

/// Theorem normalisation (H_1 = p^T h p / 2) or rescaled by (s+1) (H_1 = p^T h p).
enum class Convention { theorem, rescaled };

std::string_view to_string(Convention c);

struct IntegralValue {
  int order = 0;
  double value = 0.0;
  Convention convention = Convention::theorem;
};

/// Upper bound on C(n+s, s+1) * s!, the number of (I, rho) pairs an evaluation touches.
struct EnumerationBudget {
  std::uint64_t max_terms = 50'000'000;
};

/// C(n+s, s+1) * s!, saturating at UINT64_MAX.
std::uint64_t term_count(std::size_t n, int s);

/// Throws BudgetExceeded if term_count(n, s) is above the budget.
void check_budget(std::size_t n, int s, const EnumerationBudget& budget = {});

/// All C(n+s, s+1) non-decreasing (s+1)-tuples over {0..n-1}, lexicographic order.
std::vector<MultiIndex> enumerate_multi_indices(std::size_t n, int s, const EnumerationBudget& budget = {});

/// All s! maps rho with rho(j) < j, each carrying c_rho. For s = 0 returns the empty map with c = 1.
std::vector<RhoMap> enumerate_rho(int s, const EnumerationBudget& budget = {});

/// c_rho built up one value at a time: starting from 1, appending rho(m) = j
/// multiplies by 2, 1, 0 when j >= 1 has been hit 0, 1, 2+ times before;
/// j = 0 is allowed exactly once.
std::uint64_t c_rho(const RhoMap& rho);

/// True iff the coefficients over all of P_s sum to exactly s!.
bool check_c_sum(int s, const EnumerationBudget& budget = {});

/// The nonzero rho maps for a given s, merged by exponent pattern. Pattern
/// weights w_m (m = 0..s) turn the exponent into sum_m w_m q_{i_m}.
struct RhoPattern {
  std::vector<int> weights;
  double coefficient = 0.0;
};

/// Cached, thread-safe. Patterns are sorted for reproducible summation order.
std::shared_ptr<const std::vector<RhoPattern>> rho_patterns(int s);

/// H_s at an ordered state:
///   sum_I (1/I!) p_I sum_rho c_rho exp(sum_{j=1..s} (q_{i_j} - q_{i_rho(j)})).
/// Every exponent is <= 0 in the descending ordering.
IntegralValue eval_H(int s, const PeakonState& state, Convention convention = Convention::theorem,
                     const EnumerationBudget& budget = {});

/// Plain value in the theorem convention.
double integral(int s, const PeakonState& state, const EnumerationBudget& budget = {});

/// dH_s as (dH/dq_1..dH/dq_n, dH/dp_1..dH/dp_n), theorem convention.
std::vector<double> grad_H(int s, const PeakonState& state, const EnumerationBudget& budget = {});

/// H_0..H_{max_order} in the given convention.
std::vector<IntegralValue> integral_table(int max_order, const PeakonState& state,
                                          Convention convention = Convention::theorem,
                                          const EnumerationBudget& budget = {});

}  // namespace peakon
