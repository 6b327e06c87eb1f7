#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "peakon/core.hpp"
#include "peakon/errors.hpp"
#include "peakon/dynamics.hpp"
#include "peakon/first_integrals.hpp"

using namespace peakon;

namespace {

std::uint64_t factorial(int s) {
  std::uint64_t f = 1;
  for (int i = 2; i <= s; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("multi-index enumeration") {
  const auto m = enumerate_multi_indices(2, 1);
  REQUIRE(m.size() == 3);
  CHECK(m[0].entries == std::vector<std::uint32_t>{0, 0});
  CHECK(m[0].factorial_weight == 2);
  CHECK(m[1].entries == std::vector<std::uint32_t>{0, 1});
  CHECK(m[1].factorial_weight == 1);
  CHECK(m[2].entries == std::vector<std::uint32_t>{1, 1});
  CHECK(m[2].factorial_weight == 2);

  const auto one = enumerate_multi_indices(1, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].factorial_weight == 24);

  for (std::size_t n = 1; n <= 5; ++n) {
    for (int s = 0; s <= 4; ++s) {
      const auto all = enumerate_multi_indices(n, s);
      CHECK(all.size() == binomial(n + static_cast<std::size_t>(s), static_cast<std::size_t>(s) + 1));
      for (const auto& I : all) {
        CHECK(std::is_sorted(I.entries.begin(), I.entries.end()));
        CHECK(factorial(s + 1) % I.factorial_weight == 0);
      }
    }
  }
}

TEST_CASE("rho enumeration and coefficients") {
  for (int s = 0; s <= 7; ++s) {
    const auto all = enumerate_rho(s);
    CHECK(all.size() == factorial(s));
    std::uint64_t sum = 0;
    for (const auto& r : all) {
      for (std::size_t j = 0; j < r.values.size(); ++j) CHECK(r.values[j] <= j);
      std::vector<int> v(r.values.begin(), r.values.end());
      CHECK(r.coefficient == oracle::coefficient(v));
      CHECK(r.coefficient == c_rho(r));
      sum += r.coefficient;
    }
    CHECK(sum == factorial(s));
    CHECK(check_c_sum(s));
  }

  const auto two = enumerate_rho(2);
  std::map<std::vector<std::uint32_t>, std::uint64_t> m2;
  for (const auto& r : two) m2[r.values] = r.coefficient;
  CHECK(m2.at({0, 0}) == 0);
  CHECK(m2.at({0, 1}) == 2);

  std::map<std::vector<std::uint32_t>, std::uint64_t> nz3;
  for (const auto& r : enumerate_rho(3))
    if (r.coefficient) nz3[r.values] = r.coefficient;
  CHECK(nz3.size() == 2);
  CHECK(nz3.at({0, 1, 1}) == 2);
  CHECK(nz3.at({0, 1, 2}) == 4);
}

TEST_CASE("admissible coefficients are powers of two with bounded preimages") {
  const std::vector<std::size_t> admissible{1, 1, 2, 5, 16, 61, 272};
  for (int s = 1; s <= 7; ++s) {
    std::size_t count = 0;
    for (const auto& r : enumerate_rho(s)) {
      std::vector<int> hits(static_cast<std::size_t>(s) + 1, 0);
      for (auto v : r.values) ++hits[v];
      const bool ok = hits[0] <= 1 && std::all_of(hits.begin() + 1, hits.end(), [](int h) { return h <= 2; });
      if (!ok) {
        CHECK(r.coefficient == 0);
        continue;
      }
      ++count;
      CHECK(r.coefficient > 0);
      CHECK((r.coefficient & (r.coefficient - 1)) == 0);
    }
    CHECK(count == admissible[static_cast<std::size_t>(s - 1)]);
  }
}

TEST_CASE("c_rho examples") {
  CHECK(c_rho(RhoMap{{0, 1, 2}, 0}) == 4);
  CHECK(c_rho(RhoMap{{0, 1, 1}, 0}) == 2);
  CHECK(c_rho(RhoMap{{0, 0}, 0}) == 0);
  CHECK(c_rho(RhoMap{{}, 0}) == 1);
}

TEST_CASE("eval_H matches the definition summed directly") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
    const auto st = oracle::random_state(rng, n);
    for (int s = 0; s <= 4; ++s) {
      const double ref = oracle::naive_H(s, st);
      CHECK(integral(s, st) == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("low orders are momentum and energy") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto st = oracle::random_state(rng, 1 + static_cast<std::size_t>(trial % 6));
    CHECK(integral(0, st) == doctest::Approx(momentum(st)).epsilon(1e-14));
    CHECK(integral(1, st) == doctest::Approx(energy(st)).epsilon(1e-13));
  }
}

TEST_CASE("single peakon: H_s = p^{s+1} / (s+1)") {
  const auto st = PeakonState::ordered({0.4}, {1.7});
  for (int s = 0; s <= 6; ++s) {
    CHECK(integral(s, st) == doctest::Approx(std::pow(1.7, s + 1) / (s + 1)).epsilon(1e-14));
    const auto g = grad_H(s, st);
    CHECK(std::abs(g[0]) < 1e-14);
    CHECK(g[1] == doctest::Approx(std::pow(1.7, s)).epsilon(1e-14));
  }
}

TEST_CASE("printed three-peakon H_2 example") {
  const auto st = PeakonState::ordered({1.0, 0.0, -1.0}, {1.0, 1.0, 1.0});
  const double expected = 1.0 + 4.0 * std::exp(-1.0) + 4.0 * std::exp(-2.0);
  CHECK(integral(2, st) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(oracle::printed_H2(st) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("printed H_2 and H_3 at random states") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s3 = oracle::random_state(rng, 3);
    CHECK(oracle::rel_err(integral(2, s3), oracle::printed_H2(s3), oracle::printed_H2_scale(s3)) < 1e-12);
    const auto s4 = oracle::random_state(rng, 4);
    double scale = 0.0;
    const double h3 = oracle::printed_H3(s4, &scale);
    CHECK(oracle::rel_err(integral(3, s4), h3, scale) < 1e-12);
  }
}

TEST_CASE("literal 6e pair coefficient in H_3 is not conserved") {
  const auto st = PeakonState::ordered({0.0, -0.7, -1.3, -2.2}, {1.0, 1.37, 0.5, 0.8});
  const auto tr = integrate(st, 5.0);
  const auto end = tr.state_at(5.0);
  CHECK(std::abs(oracle::printed_H3(end) - oracle::printed_H3(st)) < 1e-8);
  CHECK(std::abs(oracle::printed_H3(end, nullptr, true) - oracle::printed_H3(st, nullptr, true)) > 1e-2);
}

TEST_CASE("diagonal limit H_s -> H_0^{s+1} / (s+1)") {
  const double d = 1e-7;
  const auto st = PeakonState::ordered({3 * d, 2 * d, d}, {1.0, 2.0, 3.0});
  CHECK(integral(2, st) == doctest::Approx(72.0).epsilon(1e-5));
}

TEST_CASE("homogeneity, translation invariance and rescaled convention") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto st = oracle::random_state(rng, 4);
    std::vector<double> q(st.q().begin(), st.q().end()), p(st.p().begin(), st.p().end());
    std::vector<double> q2 = q, p2 = p;
    for (auto& x : q2) x -= 2.5;
    for (auto& x : p2) x *= 1.5;
    const auto shifted = PeakonState::ordered(q2, p);
    const auto scaled = PeakonState::ordered(q, p2);
    for (int s = 0; s <= 3; ++s) {
      const double h = integral(s, st);
      CHECK(integral(s, shifted) == doctest::Approx(h).epsilon(1e-12).scale(1.0));
      CHECK(integral(s, scaled) == doctest::Approx(std::pow(1.5, s + 1) * h).epsilon(1e-12).scale(1.0));
      const auto r = eval_H(s, st, Convention::rescaled);
      CHECK(r.convention == Convention::rescaled);
      CHECK(r.value == doctest::Approx((s + 1) * h).epsilon(1e-14).scale(1.0));
    }
  }
}

TEST_CASE("grad_H matches finite differences and sums to zero over q") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const auto st = oracle::random_state(rng, n);
    for (int s = 0; s <= 3; ++s) {
      const auto g = grad_H(s, st);
      const auto fd = oracle::fd_grad([s](const PeakonState& x) { return integral(s, x); }, st);
      double scale = 0.0, qsum = 0.0;
      for (double v : fd) scale = std::max(scale, std::abs(v));
      for (std::size_t i = 0; i < n; ++i) qsum += g[i];
      for (std::size_t a = 0; a < g.size(); ++a) CHECK(std::abs(g[a] - fd[a]) < 1e-6 * std::max(1.0, scale));
      CHECK(std::abs(qsum) < 1e-12 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("integral table") {
  const auto st = PeakonState::ordered({0.0}, {2.0});
  const auto t = integral_table(2, st);
  REQUIRE(t.size() == 3);
  CHECK(t[0].value == doctest::Approx(2.0));
  CHECK(t[1].value == doctest::Approx(2.0));
  CHECK(t[2].value == doctest::Approx(8.0 / 3.0));
  CHECK(t[2].order == 2);
  const auto r = integral_table(1, st, Convention::rescaled);
  CHECK(r[1].value == doctest::Approx(4.0));
}

TEST_CASE("enumeration budget") {
  CHECK(term_count(3, 2) == binomial(5, 3) * 2);
  CHECK_NOTHROW(check_budget(8, 7));
  CHECK_THROWS_AS(check_budget(20, 12), BudgetExceeded);
  CHECK_THROWS_AS(enumerate_rho(12), BudgetExceeded);
  const auto st = PeakonState::ordered({1.0, 0.0}, {1.0, 1.0});
  CHECK_THROWS_AS(eval_H(4, st, Convention::theorem, EnumerationBudget{10}), BudgetExceeded);
  CHECK(term_count(1000, 40) == UINT64_MAX);
}
