#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "peakon/core.hpp"
#include "peakon/errors.hpp"
#include "peakon/field.hpp"

using namespace peakon;

TEST_CASE("eval_u") {
  const auto one = PeakonState::ordered({0.4}, {1.3});
  CHECK(eval_u(one, 0.4) == 1.3);
  CHECK(std::abs(eval_u(one, 60.0)) < 1e-20);
  CHECK(std::abs(eval_u(one, -60.0)) < 1e-20);
  const auto anti = PeakonState::ordered({1.0, -0.4}, {1.0, -1.0});
  CHECK(std::abs(eval_u(anti, 0.3)) < 1e-16);
}

TEST_CASE("eval_u does not depend on input order") {
  const std::vector<double> q{-1.0, 0.5, 2.0}, p{0.3, -1.1, 0.8};
  const std::vector<double> q2{2.0, -1.0, 0.5}, p2{0.8, 0.3, -1.1};
  const auto a = validate_state(q, p), b = validate_state(q2, p2);
  for (double x = -3.0; x <= 3.0; x += 0.25) CHECK(eval_u(a, x) == eval_u(b, x));
}

TEST_CASE("eval_ux") {
  const auto one = PeakonState::ordered({0.0}, {2.0});
  const auto left = eval_ux(one, -0.5);
  CHECK(left.left == left.right);
  CHECK(left.left == doctest::Approx(2.0 * std::exp(-0.5)));
  const auto at = eval_ux(one, 0.0);
  CHECK(at.right - at.left == doctest::Approx(-4.0));

  std::mt19937_64 rng(5);
  const auto st = oracle::random_state(rng, 4);
  const auto j = eval_ux(st, st.q(2));
  CHECK(j.right - j.left == doctest::Approx(-2.0 * st.p(2)).epsilon(1e-14));
  for (double x = -4.0; x <= 1.0; x += 0.0731) {
    bool near = false;
    for (double qi : st.q()) near = near || std::abs(x - qi) < 1e-3;
    if (near) continue;
    const double h = 1e-6;
    const double fd = (eval_u(st, x + h) - eval_u(st, x - h)) / (2 * h);
    CHECK(std::abs(fd - eval_ux(st, x).left) < 1e-6);
  }
}

TEST_CASE("profile sampling") {
  const auto st = PeakonState::ordered({0.0}, {1.0});
  const auto w = sample_profile(st, -2.0, 2.0, 5);
  REQUIRE(w.x.size() == 5);
  CHECK(w.x[2] == 0.0);
  CHECK(w.u[2] == 1.0);
  CHECK(w.u[0] == doctest::Approx(w.u[4]));
  CHECK(w.ux[2] == 0.0);
  CHECK_THROWS_AS(sample_profile(st, -1.0, 1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(sample_profile(st, 1.0, -1.0, 10), InvalidArgument);
  CHECK(sample_profile(st, 0.5, 0.5, 1).x.size() == 1);
}

TEST_CASE("H1 norm closed forms") {
  const auto one = PeakonState::ordered({0.3}, {1.7});
  CHECK(h1_norm_sq(one) == doctest::Approx(2.0 * 1.7 * 1.7).epsilon(1e-15));
  const double s = 0.9, p1 = 1.2, p2 = -0.4;
  const auto two = PeakonState::ordered({s, 0.0}, {p1, p2});
  CHECK(h1_norm_sq(two) == doctest::Approx(2.0 * (p1 * p1 + p2 * p2 + 2 * p1 * p2 * std::exp(-s))).epsilon(1e-15));
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto st = oracle::random_state(rng, 1 + static_cast<std::size_t>(trial % 5));
    CHECK(h1_norm_sq(st) == doctest::Approx(4.0 * energy(st)).epsilon(1e-13));
    const double quad = h1_norm_sq_quadrature(st);
    CHECK(std::abs(quad - h1_norm_sq(st)) <= 1e-8 * std::abs(h1_norm_sq(st)));
  }
}

TEST_CASE("H1 quadrature oracle is independent of the peak splitting") {
  // Plain Gauss-Kronrod over a wide window with the peaks as the only breakpoints.
  const auto st = PeakonState::ordered({0.0}, {1.5});
  auto f = [&](double x) {
    const double u = eval_u(st, x);
    return 2.0 * u * u;  // u_x^2 = u^2 for a single peakon
  };
  const double right = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 50.0, 15, 1e-14);
  CHECK(2.0 * right == doctest::Approx(h1_norm_sq(st)).epsilon(1e-12));
}

TEST_CASE("Oleinik supremum") {
  const auto one = PeakonState::ordered({0.0}, {1.3});
  CHECK(oleinik_sup(one) == doctest::Approx(1.3));
  const auto ex = ux_extrema(one);
  CHECK(ex.inf == doctest::Approx(-1.3));

  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto st = oracle::random_state(rng, 1 + static_cast<std::size_t>(trial % 5));
    std::vector<double> neg(st.p().begin(), st.p().end());
    for (auto& x : neg) x = -x;
    const auto reflected = st.with_momenta(neg);
    CHECK(oleinik_sup(reflected) == doctest::Approx(-ux_extrema(st).inf).epsilon(1e-14));

    // Dense grid plus both one-sided limits at every peak.
    const double lo = st.q(st.size() - 1) - 10.0, hi = st.q(0) + 10.0;
    double gmax = 0.0, gmin = 0.0;
    for (int i = 0; i <= 100000; ++i) {
      const auto l = eval_ux(st, lo + (hi - lo) * i / 100000.0);
      gmax = std::max({gmax, l.left, l.right});
      gmin = std::min({gmin, l.left, l.right});
    }
    for (double qi : st.q()) {
      const auto l = eval_ux(st, qi);
      gmax = std::max({gmax, l.left, l.right});
      gmin = std::min({gmin, l.left, l.right});
    }
    const auto e = ux_extrema(st);
    CHECK(std::abs(e.sup - gmax) < 1e-6);
    CHECK(std::abs(e.inf - gmin) < 1e-6);
  }
}

TEST_CASE("strong residual") {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-8.0 + 16.0 * i / 400.0);

  // Travelling wave u = p e^{-|x - q0 - p t|}.
  const auto one = integrate(PeakonState::ordered({0.3}, {1.5}), 2.0);
  const auto r1 = strong_residual(one, 1.0, grid);
  CHECK(r1.max_abs < 1e-5);
  CHECK(r1.evaluated + r1.skipped.size() == grid.size());

  const auto two = integrate(PeakonState::ordered({1.0, -1.0}, {1.0, 0.5}), 3.0);
  const auto r2 = strong_residual(two, 1.0, grid);
  CHECK(r2.max_abs < 1e-4);

  Trajectory bad = two;
  for (auto& seg : bad.segments)
    for (auto& step : seg.steps)
      for (auto& c : step.coeff)
        for (std::size_t i = 2; i < 4; ++i) c[i] *= 1.1;
  CHECK(strong_residual(bad, 1.0, grid).max_abs > 1e-2);

  // Points on a peak are skipped and reported.
  const auto at = two.state_at(1.0);
  const std::vector<double> on_peak{at.q(0), at.q(0) + 0.5};
  const auto r3 = strong_residual(two, 1.0, on_peak);
  CHECK(r3.skipped.size() == 1);
  CHECK(r3.evaluated == 1);
  CHECK_THROWS_AS(strong_residual(two, 50.0, grid), DomainError);
}
