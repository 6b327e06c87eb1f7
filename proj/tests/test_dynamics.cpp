#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "peakon/core.hpp"
#include "peakon/dynamics.hpp"
#include "peakon/errors.hpp"
#include "peakon/first_integrals.hpp"

using namespace peakon;

namespace {

double max_rel_drift(const Trajectory& tr, std::size_t segment) {
  const auto& smp = tr.segments[segment].samples;
  double worst = 0.0;
  for (std::size_t k = 0; k < smp.front().integrals.size(); ++k) {
    const double ref = smp.front().integrals[k];
    for (const auto& s : smp) worst = std::max(worst, std::abs(s.integrals[k] - ref) / std::max(std::abs(ref), 1e-300));
  }
  return worst;
}

}  // namespace

TEST_CASE("rhs examples") {
  const auto one = rhs(PeakonState::ordered({0.7}, {1.3}));
  CHECK(one.qdot[0] == 1.3);
  CHECK(one.pdot[0] == 0.0);

  const double s = 0.8, a = 1.7, e = std::exp(-s);
  const auto two = rhs(PeakonState::ordered({s, 0.0}, {a, a}));
  CHECK(two.qdot[0] == doctest::Approx(a + a * e).epsilon(1e-15));
  CHECK(two.qdot[1] == doctest::Approx(a * e + a).epsilon(1e-15));
  CHECK(two.pdot[0] == doctest::Approx(a * a * e).epsilon(1e-15));
  CHECK(two.pdot[1] == doctest::Approx(-a * a * e).epsilon(1e-15));
}

TEST_CASE("config validation") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.merge_gap = 5e-12;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.rtol = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK_THROWS_AS(integrate(PeakonState::ordered({0.0}, {1.0}, 1.0), 0.5), InvalidArgument);
}

TEST_CASE("single peakon travels at constant speed") {
  const auto tr = integrate(PeakonState::ordered({0.25}, {1.5}), 4.0);
  CHECK(tr.events.empty());
  REQUIRE(tr.segments.size() == 1);
  for (const auto& s : tr.segments[0].samples) CHECK(std::abs(s.state.q(0) - (0.25 + 1.5 * s.state.time())) < 1e-12);
  CHECK(tr.final_state().time() == 4.0);
  CHECK(tr.state_at(2.0).q(0) == doctest::Approx(3.25).epsilon(1e-13));
}

TEST_CASE("two equal peakons never collide and conserve H0 and H1") {
  const auto tr = integrate(PeakonState::ordered({1.0, 0.0}, {1.0, 1.0}), 20.0);
  CHECK(tr.events.empty());
  const auto& smp = tr.segments[0].samples;
  for (const auto& s : smp) {
    CHECK(std::abs(s.integrals[0] - 2.0) < 1e-8);
    CHECK(std::abs(s.integrals[1] - smp.front().integrals[1]) < 1e-8);
  }
  for (std::size_t i = 1; i < smp.size(); ++i) CHECK(smp[i].state.time() > smp[i - 1].state.time());
}

TEST_CASE("peakon-antipeakon annihilates") {
  const auto tr = integrate(PeakonState::ordered({0.5, -0.5}, {-1.0, 1.0}), 3.0);
  REQUIRE(tr.events.size() == 1);
  const auto& ev = tr.events[0];
  CHECK(ev.pair == 0);
  CHECK(ev.post_state.size() == 1);
  CHECK(std::abs(ev.post_state.p(0)) < 1e-12);
  CHECK(ev.energy_drop > 0.0);
  CHECK(ev.t_star >= ev.t_event);
  REQUIRE(tr.segments.size() == 2);
  CHECK(tr.segments[1].peakons() == 1);
  CHECK(std::abs(tr.final_state().p(0)) < 1e-12);
}

TEST_CASE("merge") {
  const auto st = PeakonState::ordered({0.3 + 5e-10, 0.3}, {-1.0, 3.0});
  const auto m = merge(st, 0, 1e-9);
  CHECK(m.size() == 1);
  CHECK(m.p(0) == 2.0);
  CHECK(m.q(0) == doctest::Approx(0.3 + 2.5e-10).epsilon(1e-15));
  CHECK_THROWS_AS(merge(st, 1, 1e-9), InvalidArgument);
  CHECK_THROWS_AS(merge(PeakonState::ordered({1.0, 0.0}, {1.0, 1.0}), 0, 1e-9), InvalidArgument);

  const auto anti = merge(PeakonState::ordered({1e-10, 0.0}, {-2.0, 2.0}), 0, 1e-9);
  CHECK(anti.p(0) == 0.0);

  const auto three = PeakonState::ordered({2.0, 1e-10, 0.0}, {0.5, -1.0, 2.0});
  const auto m3 = merge(three, 1, 1e-9);
  CHECK(m3.size() == 2);
  CHECK(m3.q(0) == 2.0);
  CHECK(m3.p(0) == 0.5);
  CHECK(momentum(m3) == doctest::Approx(momentum(three)).epsilon(1e-15));
  CHECK(energy(m3) <= energy(three));
}

TEST_CASE("split") {
  const auto st = PeakonState::ordered({1.0, 0.0}, {2.0, -1.0});
  const auto sp = split(st, 0, 0.25, 0.1);
  CHECK_FALSE(sp.dissipative);
  REQUIRE(sp.state.size() == 3);
  CHECK(sp.state.q(0) == doctest::Approx(1.05));
  CHECK(sp.state.q(1) == doctest::Approx(0.95));
  CHECK(sp.state.p(0) == doctest::Approx(0.5));
  CHECK(sp.state.p(1) == doctest::Approx(1.5));
  CHECK(momentum(sp.state) == doctest::Approx(momentum(st)).epsilon(1e-15));
  CHECK_THROWS_AS(split(st, 0, 0.5, 2.5), InvalidArgument);
  CHECK_THROWS_AS(split(st, 0, 1.5, 0.1), InvalidArgument);

  // lambda = 1, gap -> 0 recovers the original energy.
  double prev = 1e300;
  for (double g = 1e-1; g > 1e-8; g /= 10.0) {
    const double diff = std::abs(energy(split(st, 0, 1.0, g).state) - energy(st));
    CHECK(diff < prev);
    prev = diff;
  }
  CHECK(prev < 1e-7);

  const auto back = merge(split(st, 1, 0.3, 1e-9).state, 1, 1e-9);
  CHECK(back.size() == 2);
  CHECK(back.q(1) == doctest::Approx(0.0).scale(1.0));
  CHECK(back.p(1) == doctest::Approx(-1.0).epsilon(1e-15));

  const auto tr = integrate(split(st, 0, 0.4, 0.05).state, 2.0);
  const double h0 = momentum(st);
  for (const auto& seg : tr.segments)
    for (const auto& s : seg.samples) CHECK(std::abs(momentum(s.state) - h0) < 1e-10);
}

TEST_CASE("regularized coordinates") {
  const auto eq = regularized_coords(PeakonState::ordered({1.0, 0.5}, {0.7, 0.7}), 0);
  CHECK(eq.psi == doctest::Approx(1.4));
  CHECK(eq.xi == 0.0);
  const auto rc = regularized_coords(PeakonState::ordered({2.0, 1.0}, {3.0, 1.0}), 0);
  CHECK(rc.psi == 4.0);
  CHECK(rc.xi == 2.0);
  CHECK_THROWS_AS(regularized_coords(PeakonState::ordered({2.0, 1.0}, {3.0, 1.0}), 1), InvalidArgument);
}

TEST_CASE("conservation on random non-colliding data") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> mom(0.2, 2.0);
  for (std::size_t n = 2; n <= 5; ++n) {
    // Equal-sign momenta never collide.
    auto base = oracle::random_state(rng, n, 0.3, 1.5);
    std::vector<double> p(n);
    for (auto& x : p) x = mom(rng);
    const auto st = base.with_momenta(p);
    const auto tr = integrate(st, 10.0);
    CHECK(tr.events.empty());
    CHECK(tr.segments[0].samples.front().integrals.size() == n);
    CHECK(max_rel_drift(tr, 0) < 1e-7);
  }
}

TEST_CASE("time reversal, translation and scaling symmetries") {
  const auto st = PeakonState::ordered({1.0, 0.0, -1.2}, {1.2, 0.4, 0.9});
  const double T = 3.0;
  const auto fwd = integrate(st, T).final_state();
  std::vector<double> minus(fwd.p().begin(), fwd.p().end());
  for (auto& x : minus) x = -x;
  const auto back = integrate(PeakonState::ordered(std::vector<double>(fwd.q().begin(), fwd.q().end()), minus, 0.0), T)
                        .final_state();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(back.q(i) - st.q(i)) < 1e-8);
    CHECK(std::abs(back.p(i) + st.p(i)) < 1e-8);
  }

  std::vector<double> qs(st.q().begin(), st.q().end());
  for (auto& x : qs) x += 5.0;
  const auto shifted = integrate(PeakonState::ordered(qs, std::vector<double>(st.p().begin(), st.p().end())), T);
  const auto plain = integrate(st, T);
  for (double t : {0.5, 1.7, 3.0}) {
    const auto a = plain.state_at(t), b = shifted.state_at(t);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(b.q(i) - a.q(i) - 5.0) < 1e-8);
      CHECK(std::abs(b.p(i) - a.p(i)) < 1e-8);
    }
  }

  const double lambda = 1.7;
  std::vector<double> ps(st.p().begin(), st.p().end());
  for (auto& x : ps) x *= lambda;
  const auto fast = integrate(PeakonState::ordered(std::vector<double>(st.q().begin(), st.q().end()), ps), T / lambda);
  for (double t : {0.3, 1.0, T / lambda}) {
    const auto a = fast.state_at(t), b = plain.state_at(lambda * t);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(a.q(i) - b.q(i)) < 1e-8);
      CHECK(std::abs(a.p(i) - lambda * b.p(i)) < 1e-8);
    }
  }
}

TEST_CASE("three-peakon collision: event invariants and regularized approach") {
  const auto st = PeakonState::ordered({2.0, 0.0, -1.5}, {0.3, -1.0, 1.5});
  const auto tr = integrate(st, 6.0);
  REQUIRE_FALSE(tr.events.empty());
  for (std::size_t e = 0; e < tr.events.size(); ++e) {
    const auto& ev = tr.events[e];
    CHECK(std::abs(momentum(ev.post_state) - momentum(ev.pre_state)) < 1e-12);
    CHECK(energy(ev.post_state) <= energy(ev.pre_state));
    CHECK(ev.post_state.size() + 1 == ev.pre_state.size());
    CHECK(tr.segments[e + 1].peakons() + 1 == tr.segments[e].peakons());
  }
  const auto& ev = tr.events[0];
  REQUIRE(ev.approach.size() > 2);
  double xi_ref = 0.0, xi_max = 0.0, dp_max = 0.0;
  for (const auto& a : ev.approach) {
    if (a.gap >= 0.1) xi_ref = std::abs(a.xi);
    xi_max = std::max(xi_max, std::abs(a.xi));
    dp_max = std::max(dp_max, std::abs(a.dp));
  }
  CHECK(xi_ref > 0.0);
  CHECK(xi_max < 10.0 * xi_ref);
  CHECK(dp_max > 1e3);
  const auto& last = ev.approach[ev.approach.size() - 1];
  const auto& prev = ev.approach[ev.approach.size() - 2];
  CHECK(std::abs(last.psi - prev.psi) < 1e-5);
  CHECK(std::abs(ev.psi - last.psi) < 1e-3);
  // Reduced integrals on the merged segment.
  CHECK(max_rel_drift(tr, 1) < 1e-7);
}

TEST_CASE("dense output and sample bookkeeping") {
  const auto st = PeakonState::ordered({0.5, -0.5}, {-1.0, 1.0});
  const auto tr = integrate(st, 3.0);
  CHECK(tr.sample_count() > 10);
  const auto& ev = tr.events.at(0);
  CHECK(tr.state_at(0.0).q(0) == 0.5);
  CHECK_THROWS_AS((void)tr.state_at(10.0), DomainError);
  const auto mid = tr.state_at(0.5 * ev.t_event);
  const auto v = tr.velocity_at(0.5 * ev.t_event);
  const auto f = rhs(mid);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(std::abs(v.qdot[i] - f.qdot[i]) < 1e-7);
    CHECK(std::abs(v.pdot[i] - f.pdot[i]) < 1e-7);
  }
}

TEST_CASE("tolerances at round-off level exhaust the step budget") {
  IntegratorConfig cfg;
  cfg.rtol = 1e-15;
  cfg.atol = 1e-300;
  cfg.merge_gap = 1e-12;
  cfg.max_steps = 20'000;
  const auto st = PeakonState::ordered({0.5, -0.5}, {-1.0, 1.0});
  CHECK_THROWS_WITH_AS(integrate(st, 3.0, cfg), doctest::Contains("step budget"), IntegrationError);
  cfg.max_steps = 0;
  CHECK_THROWS_AS(integrate(st, 3.0, cfg), InvalidArgument);
}
