#include "peakon/first_integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

#include "peakon/errors.hpp"

namespace peakon {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > kSaturated / a) return kSaturated;
  return a * b;
}

std::uint64_t factorial(int k) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) f = sat_mul(f, static_cast<std::uint64_t>(i));
  return f;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step.
    const std::uint64_t num = n - k + i;
    const std::uint64_t g = std::gcd(r, i);
    const std::uint64_t rr = r / g;
    const std::uint64_t ii = i / g;
    r = sat_mul(rr, num / ii);
    if (r == kSaturated) return r;
  }
  return r;
}

// Extension factor for appending value j to a map whose preimage counts are `hits`.
std::uint64_t extension_factor(std::uint32_t j, const std::vector<int>& hits) {
  const int h = hits[j];
  if (j == 0) return h == 0 ? 1 : 0;
  switch (h) {
    case 0: return 2;
    case 1: return 1;
    default: return 0;
  }
}

void check_order(int s) {
  if (s < 0) throw InvalidArgument("integral order must be non-negative");
}

}  // namespace

std::string_view to_string(Convention c) { return c == Convention::theorem ? "theorem" : "rescaled"; }

std::uint64_t term_count(std::size_t n, int s) {
  check_order(s);
  return sat_mul(binomial(n + static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(s) + 1), factorial(s));
}

void check_budget(std::size_t n, int s, const EnumerationBudget& budget) {
  const std::uint64_t terms = term_count(n, s);
  if (terms > budget.max_terms) {
    throw BudgetExceeded("H_" + std::to_string(s) + " with n=" + std::to_string(n) + " needs " +
                         (terms == kSaturated ? std::string("more than 2^64") : std::to_string(terms)) +
                         " terms, budget is " + std::to_string(budget.max_terms));
  }
}

std::vector<MultiIndex> enumerate_multi_indices(std::size_t n, int s, const EnumerationBudget& budget) {
  if (n == 0) throw InvalidArgument("n must be at least 1");
  check_budget(n, s, budget);
  const std::size_t len = static_cast<std::size_t>(s) + 1;
  std::vector<MultiIndex> out;
  out.reserve(binomial(n + s, len));
  std::vector<std::uint32_t> cur(len, 0);
  const auto last = static_cast<std::uint32_t>(n - 1);
  while (true) {
    MultiIndex mi;
    mi.entries = cur;
    std::size_t run = 1;
    for (std::size_t m = 1; m <= len; ++m) {
      if (m < len && cur[m] == cur[m - 1]) {
        ++run;
      } else {
        mi.factorial_weight *= factorial(static_cast<int>(run));
        run = 1;
      }
    }
    out.push_back(std::move(mi));
    // Next non-decreasing tuple: bump the rightmost entry below n-1, reset the tail to it.
    std::size_t pos = len;
    while (pos > 0 && cur[pos - 1] == last) --pos;
    if (pos == 0) break;
    const std::uint32_t v = cur[pos - 1] + 1;
    std::fill(cur.begin() + static_cast<std::ptrdiff_t>(pos - 1), cur.end(), v);
  }
  return out;
}

std::vector<RhoMap> enumerate_rho(int s, const EnumerationBudget& budget) {
  check_order(s);
  if (factorial(s) > budget.max_terms) {
    throw BudgetExceeded("|P_" + std::to_string(s) + "| = " + std::to_string(factorial(s)) + " exceeds budget");
  }
  struct Partial {
    RhoMap map;
    std::vector<int> hits;
  };
  std::vector<Partial> level{{RhoMap{{}, 1}, std::vector<int>(1, 0)}};
  for (int m = 1; m <= s; ++m) {
    std::vector<Partial> next;
    next.reserve(level.size() * static_cast<std::size_t>(m));
    for (const auto& part : level) {
      for (std::uint32_t j = 0; j < static_cast<std::uint32_t>(m); ++j) {
        Partial ext = part;
        ext.map.values.push_back(j);
        ext.map.coefficient *= extension_factor(j, part.hits);
        ++ext.hits[j];
        ext.hits.push_back(0);
        next.push_back(std::move(ext));
      }
    }
    level = std::move(next);
  }
  std::vector<RhoMap> out;
  out.reserve(level.size());
  for (auto& part : level) out.push_back(std::move(part.map));
  return out;
}

std::uint64_t c_rho(const RhoMap& rho) {
  const std::size_t s = rho.values.size();
  std::vector<int> hits(s + 1, 0);
  std::uint64_t c = 1;
  for (std::size_t m = 1; m <= s; ++m) {
    const std::uint32_t j = rho.values[m - 1];
    if (j >= m) throw InvalidArgument("rho(" + std::to_string(m) + ") must be below " + std::to_string(m));
    c *= extension_factor(j, hits);
    ++hits[j];
  }
  return c;
}

bool check_c_sum(int s, const EnumerationBudget& budget) {
  std::uint64_t total = 0;
  for (const auto& rho : enumerate_rho(s, budget)) total += rho.coefficient;
  return total == factorial(s);
}

std::shared_ptr<const std::vector<RhoPattern>> rho_patterns(int s) {
  check_order(s);
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const std::vector<RhoPattern>>> cache;
  {
    const std::lock_guard lock(mutex);
    if (auto it = cache.find(s); it != cache.end()) return it->second;
  }
  std::map<std::vector<int>, std::uint64_t> grouped;
  for (const auto& rho : enumerate_rho(s)) {
    if (rho.coefficient == 0) continue;
    std::vector<int> w(static_cast<std::size_t>(s) + 1, 0);
    for (int j = 1; j <= s; ++j) {
      w[static_cast<std::size_t>(j)] += 1;
      w[rho.values[static_cast<std::size_t>(j) - 1]] -= 1;
    }
    grouped[w] += rho.coefficient;
  }
  auto patterns = std::make_shared<std::vector<RhoPattern>>();
  for (const auto& [w, c] : grouped) patterns->push_back({w, static_cast<double>(c)});
  const std::lock_guard lock(mutex);
  return cache.emplace(s, std::move(patterns)).first->second;
}

namespace {

// Shared evaluation kernel: value, and optionally the gradient.
double evaluate(int s, const PeakonState& state, const EnumerationBudget& budget, std::vector<double>* grad) {
  const std::size_t n = state.size();
  const auto indices = enumerate_multi_indices(n, s, budget);
  const auto patterns = rho_patterns(s);
  const auto q = state.q();
  const auto p = state.p();
  const std::size_t len = static_cast<std::size_t>(s) + 1;

  if (grad) grad->assign(2 * n, 0.0);
  std::vector<double> prefix(len + 1), suffix(len + 1);
  std::vector<double> dexp(len);
  std::vector<std::size_t> runs;

  double total = 0.0;
  for (const auto& mi : indices) {
    const auto& I = mi.entries;
    const double inv_weight = 1.0 / static_cast<double>(mi.factorial_weight);

    prefix[0] = 1.0;
    for (std::size_t m = 0; m < len; ++m) prefix[m + 1] = prefix[m] * p[I[m]];
    const double p_I = prefix[len];

    // Equal indices are contiguous; their integer weights are summed per run so
    // that derivatives cancelling within a run come out exactly zero.
    runs.clear();
    for (std::size_t m = 0; m < len; ++m)
      if (m == 0 || I[m] != I[m - 1]) runs.push_back(m);
    runs.push_back(len);

    double E = 0.0;
    std::fill(dexp.begin(), dexp.end(), 0.0);
    for (const auto& pat : *patterns) {
      double expo = 0.0;
      for (std::size_t m = 0; m < len; ++m) expo += pat.weights[m] * q[I[m]];
      const double term = pat.coefficient * std::exp(expo);
      E += term;
      if (grad) {
        for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
          int w = 0;
          for (std::size_t m = runs[r]; m < runs[r + 1]; ++m) w += pat.weights[m];
          if (w != 0) dexp[runs[r]] += term * w;
        }
      }
    }
    total += inv_weight * p_I * E;

    if (grad) {
      suffix[len] = 1.0;
      for (std::size_t m = len; m-- > 0;) suffix[m] = suffix[m + 1] * p[I[m]];
      for (std::size_t m = 0; m < len; ++m) {
        (*grad)[n + I[m]] += inv_weight * prefix[m] * suffix[m + 1] * E;
        (*grad)[I[m]] += inv_weight * p_I * dexp[m];
      }
    }
  }
  return total;
}

}  // namespace

IntegralValue eval_H(int s, const PeakonState& state, Convention convention, const EnumerationBudget& budget) {
  check_order(s);
  const double v = evaluate(s, state, budget, nullptr);
  const double scale = convention == Convention::rescaled ? static_cast<double>(s + 1) : 1.0;
  return {s, v * scale, convention};
}

double integral(int s, const PeakonState& state, const EnumerationBudget& budget) {
  check_order(s);
  return evaluate(s, state, budget, nullptr);
}

std::vector<double> grad_H(int s, const PeakonState& state, const EnumerationBudget& budget) {
  check_order(s);
  std::vector<double> g;
  evaluate(s, state, budget, &g);
  return g;
}

std::vector<IntegralValue> integral_table(int max_order, const PeakonState& state, Convention convention,
                                          const EnumerationBudget& budget) {
  check_order(max_order);
  check_budget(state.size(), max_order, budget);
  std::vector<IntegralValue> out;
  for (int s = 0; s <= max_order; ++s) out.push_back(eval_H(s, state, convention, budget));
  return out;
}

}  // namespace peakon
