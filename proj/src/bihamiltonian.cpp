#include "peakon/bihamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <string>

#include "peakon/errors.hpp"
#include "peakon/first_integrals.hpp"
#include "peakon/parallel.hpp"
#include "peakon/sampling.hpp"

namespace peakon {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_dim(const BivectorValue& P, std::size_t len, const char* what) {
  if (len != P.dim()) {
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(len) + ", expected " +
                          std::to_string(P.dim()));
  }
}

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::string triple_name(std::size_t n, std::array<std::size_t, 3> t) {
  auto coord = [n](std::size_t a) {
    return (a < n ? "q" : "p") + std::to_string((a < n ? a : a - n) + 1);
  };
  return coord(t[0]) + "," + coord(t[1]) + "," + coord(t[2]);
}

constexpr std::size_t kMaxListedFailures = 32;

// Per-sample outcome for one named check.
struct SampleResult {
  double residual = 0.0;
  std::string detail;
};

VerificationReport summarise(std::string check, double tol,
                             const std::vector<SampleResult>& results,
                             const std::function<PeakonState(std::size_t)>& state_of) {
  VerificationReport r;
  r.check = std::move(check);
  r.samples = results.size();
  r.tolerance = tol;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double res = results[i].residual;
    if (!(res < tol)) {
      r.pass = false;
      if (r.failures.size() < kMaxListedFailures) r.failures.push_back({i, res, results[i].detail});
    }
    if (res > r.max_residual || std::isnan(res)) {
      r.max_residual = std::isnan(res) ? std::numeric_limits<double>::infinity() : res;
      worst = i;
    }
  }
  if (!results.empty()) {
    const PeakonState s = state_of(worst);
    r.worst_q.assign(s.q().begin(), s.q().end());
    r.worst_p.assign(s.p().begin(), s.p().end());
    r.worst_detail = results[worst].detail;
  }
  return r;
}

}  // namespace

BivectorValue::BivectorValue(std::size_t n) : n_(n), upper_(2 * n * (2 * n - 1) / 2, 0.0) {}

std::size_t BivectorValue::slot(std::size_t a, std::size_t b) const {
  // Row-major strict upper triangle, a < b.
  const std::size_t m = dim();
  return a * (2 * m - a - 1) / 2 + (b - a - 1);
}

double BivectorValue::operator()(std::size_t a, std::size_t b) const {
  if (a == b) return 0.0;
  return a < b ? upper_[slot(a, b)] : -upper_[slot(b, a)];
}

void BivectorValue::add_wedge(std::size_t a, std::size_t b, double v) {
  if (a >= dim() || b >= dim()) throw InvalidArgument("bivector index out of range");
  if (a == b) return;
  if (a < b) {
    upper_[slot(a, b)] += v;
  } else {
    upper_[slot(b, a)] -= v;
  }
}

void BivectorValue::scale(double factor) {
  for (auto& x : upper_) x *= factor;
}

void BivectorValue::add_scaled(const BivectorValue& other, double factor) {
  if (other.n_ != n_) throw InvalidArgument("bivector dimensions differ");
  for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] += factor * other.upper_[i];
}

Eigen::MatrixXd BivectorValue::dense() const {
  const auto m = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) out(a, b) = (*this)(a, b);
  }
  return out;
}

std::string to_string(Bivector b) { return b == Bivector::P0 ? "P0" : "P1"; }

BivectorValue eval_P1(std::size_t n) {
  BivectorValue P(n);
  for (std::size_t i = 0; i < n; ++i) P.add_wedge(p_index(n, i), q_index(i), 1.0);
  return P;
}

BivectorValue eval_P0(const PeakonState& state) { return p0_field(state).value; }

BivectorField p0_field(const PeakonState& state) {
  const std::size_t n = state.size();
  const std::size_t m = 2 * n;
  BivectorField f{BivectorValue(n), std::vector<BivectorValue>(m, BivectorValue(n))};
  auto& P = f.value;
  auto& dP = f.gradient;

  for (std::size_t i = 0; i < n; ++i) {
    const double pi = state.p(i);
    // Diagonal terms p_i d_{p_i} ^ d_{q_i}.
    P.add_wedge(p_index(n, i), q_index(i), pi);
    dP[p_index(n, i)].add_wedge(p_index(n, i), q_index(i), 1.0);

    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = state.q(i) - state.q(j);
      const double sg = sign(d);
      const double h = std::exp(-std::abs(d));
      // p_i h_ij d_{p_i} ^ d_{q_j}; dh_ij/dq_i = -sg h, dh_ij/dq_j = sg h.
      P.add_wedge(p_index(n, i), q_index(j), pi * h);
      dP[p_index(n, i)].add_wedge(p_index(n, i), q_index(j), h);
      dP[q_index(i)].add_wedge(p_index(n, i), q_index(j), -pi * sg * h);
      dP[q_index(j)].add_wedge(p_index(n, i), q_index(j), pi * sg * h);

      if (j < i) continue;
      const double pj = state.p(j);
      // -sg p_i p_j h d_{p_i} ^ d_{p_j}
      P.add_wedge(p_index(n, i), p_index(n, j), -sg * pi * pj * h);
      dP[p_index(n, i)].add_wedge(p_index(n, i), p_index(n, j), -sg * pj * h);
      dP[p_index(n, j)].add_wedge(p_index(n, i), p_index(n, j), -sg * pi * h);
      dP[q_index(i)].add_wedge(p_index(n, i), p_index(n, j), sg * sg * pi * pj * h);
      dP[q_index(j)].add_wedge(p_index(n, i), p_index(n, j), -sg * sg * pi * pj * h);
      // sg (h - 1) d_{q_i} ^ d_{q_j}
      P.add_wedge(q_index(i), q_index(j), sg * (h - 1.0));
      dP[q_index(i)].add_wedge(q_index(i), q_index(j), -sg * sg * h);
      dP[q_index(j)].add_wedge(q_index(i), q_index(j), sg * sg * h);
    }
  }
  return f;
}

BivectorField p1_field(std::size_t n) {
  return {eval_P1(n), std::vector<BivectorValue>(2 * n, BivectorValue(n))};
}

BivectorField field_of(Bivector which, const PeakonState& state) {
  return which == Bivector::P0 ? p0_field(state) : p1_field(state.size());
}

BivectorField combine(double a, const BivectorField& P, double b, const BivectorField& R) {
  if (P.value.n() != R.value.n()) throw InvalidArgument("bivector fields differ in dimension");
  BivectorField out = P;
  out.value.scale(a);
  out.value.add_scaled(R.value, b);
  for (std::size_t i = 0; i < out.gradient.size(); ++i) {
    out.gradient[i].scale(a);
    out.gradient[i].add_scaled(R.gradient[i], b);
  }
  return out;
}

std::vector<BivectorValue> fd_gradient(const std::function<BivectorValue(const PeakonState&)>& bivector,
                                       const PeakonState& state, double rel_step) {
  const std::size_t n = state.size();
  std::vector<BivectorValue> out;
  out.reserve(2 * n);
  std::vector<double> q(state.q().begin(), state.q().end());
  std::vector<double> p(state.p().begin(), state.p().end());
  for (std::size_t c = 0; c < 2 * n; ++c) {
    double& x = c < n ? q[c] : p[c - n];
    const double x0 = x;
    const double h = rel_step * std::max(1.0, std::abs(x0));
    x = x0 + h;
    BivectorValue plus = bivector(PeakonState::ordered(q, p, state.time()));
    x = x0 - h;
    const BivectorValue minus = bivector(PeakonState::ordered(q, p, state.time()));
    x = x0;
    plus.add_scaled(minus, -1.0);
    plus.scale(1.0 / (2.0 * h));
    out.push_back(std::move(plus));
  }
  return out;
}

std::vector<double> apply_bivector(const BivectorValue& P, std::span<const double> alpha) {
  require_dim(P, alpha.size(), "covector");
  const std::size_t m = P.dim();
  std::vector<double> v(m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    if (alpha[a] == 0.0) continue;
    for (std::size_t b = 0; b < m; ++b) v[b] += alpha[a] * P(a, b);
  }
  return v;
}

std::vector<double> recursion_apply(const PeakonState& state, std::span<const double> alpha) {
  const std::size_t n = state.size();
  const auto v = apply_bivector(eval_P0(state), alpha);
  std::vector<double> beta(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    beta[p_index(n, i)] = v[q_index(i)];
    beta[q_index(i)] = -v[p_index(n, i)];
  }
  return beta;
}

double poisson_bracket(const BivectorValue& P, std::span<const double> df, std::span<const double> dg) {
  require_dim(P, df.size(), "df");
  require_dim(P, dg.size(), "dg");
  double acc = 0.0;
  for (std::size_t a = 0; a < P.dim(); ++a) {
    for (std::size_t b = a + 1; b < P.dim(); ++b) acc += P(a, b) * (df[a] * dg[b] - df[b] * dg[a]);
  }
  return acc;
}

double SnResidual::scaled() const { return std::abs(residual) / std::max(1.0, scale); }

SnResidual sn_residual(const BivectorField& P, const BivectorField& R, std::array<std::size_t, 3> t) {
  const auto [j, k, l] = t;
  const std::size_t m = P.value.dim();
  SnResidual out;
  auto add = [&out](double v) {
    out.residual += v;
    out.scale += std::abs(v);
  };
  for (std::size_t i = 0; i < m; ++i) {
    const auto& dP = P.gradient[i];
    const auto& dR = R.gradient[i];
    add(P.value(i, j) * dR(k, l));
    add(P.value(i, k) * dR(l, j));
    add(P.value(i, l) * dR(j, k));
    add(R.value(i, j) * dP(k, l));
    add(R.value(i, k) * dP(l, j));
    add(R.value(i, l) * dP(j, k));
  }
  return out;
}

double sn_bracket_residual(Bivector P, Bivector R, const PeakonState& state, std::array<std::size_t, 3> triple) {
  const std::size_t m = 2 * state.size();
  if (!(triple[0] < triple[1] && triple[1] < triple[2] && triple[2] < m)) {
    throw InvalidArgument("triple must satisfy j < k < l < 2n");
  }
  if (state.min_gap() < kSignGuard) {
    throw DomainError("state too close to a sign discontinuity (gap " + std::to_string(state.min_gap()) + ")");
  }
  return sn_residual(field_of(P, state), field_of(R, state), triple).residual;
}

double sn_max_scaled_residual(const BivectorField& P, const BivectorField& R) {
  const std::size_t m = P.value.dim();
  double worst = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      for (std::size_t l = k + 1; l < m; ++l) worst = std::max(worst, sn_residual(P, R, {j, k, l}).scaled());
    }
  }
  return worst;
}

double jacobiator(const BivectorValue& P, std::span<const BivectorValue> gradient, std::array<std::size_t, 3> t) {
  const auto [a, b, c] = t;
  double acc = 0.0;
  for (std::size_t d = 0; d < P.dim(); ++d) {
    acc += gradient[d](a, b) * P(d, c) + gradient[d](b, c) * P(d, a) + gradient[d](c, a) * P(d, b);
  }
  return acc;
}

void VerificationReport::absorb(const VerificationReport& component) {
  samples = std::max(samples, component.samples);
  pass = pass && component.pass;
  if (component.max_residual > max_residual || worst_q.empty()) {
    max_residual = std::max(max_residual, component.max_residual);
    worst_q = component.worst_q;
    worst_p = component.worst_p;
    worst_detail = component.check + ": " + component.worst_detail;
  }
  for (const auto& f : component.failures) {
    if (failures.size() >= kMaxListedFailures) break;
    failures.push_back({f.sample, f.residual, component.check + ": " + f.detail});
  }
  components.push_back(component);
}

VerificationReport verify_structure(std::size_t n, std::size_t samples, std::uint64_t seed, double tol) {
  return verify_structure(n, samples, seed, tol, [](const PeakonState& s) { return p0_field(s); });
}

VerificationReport verify_structure(std::size_t n, std::size_t samples, std::uint64_t seed, double tol,
                                    const BivectorFieldFn& p0) {
  if (n == 0) throw InvalidArgument("n must be at least 1");
  auto state_of = [n, seed](std::size_t i) {
    auto rng = sample_rng(seed, i);
    return random_state(n, rng);
  };
  const char* names[] = {"[P0,P0]", "[P0,P1]", "[P1,P1]", "P0(dH0)=P1(dH1)"};
  std::vector<std::vector<SampleResult>> results(4, std::vector<SampleResult>(samples));

  parallel_for(samples, [&](std::size_t i) {
    const PeakonState s = state_of(i);
    const BivectorField P0 = p0(s);
    const BivectorField P1 = p1_field(n);
    const std::size_t m = 2 * n;
    const BivectorField* pairs[3][2] = {{&P0, &P0}, {&P0, &P1}, {&P1, &P1}};
    for (int c = 0; c < 3; ++c) {
      SampleResult best;
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = j + 1; k < m; ++k) {
          for (std::size_t l = k + 1; l < m; ++l) {
            const double r = sn_residual(*pairs[c][0], *pairs[c][1], {j, k, l}).scaled();
            if (r > best.residual || best.detail.empty()) best = {r, "triple " + triple_name(n, {j, k, l})};
          }
        }
      }
      if (m < 3) best = {0.0, "no triples"};
      results[static_cast<std::size_t>(c)][i] = best;
    }
    std::vector<double> dH0(2 * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) dH0[p_index(n, k)] = 1.0;
    const auto lhs = apply_bivector(P0.value, dH0);
    const auto rhs = apply_bivector(P1.value, grad_H(1, s));
    double diff = 0.0;
    std::size_t at = 0;
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      if (std::abs(lhs[k] - rhs[k]) > diff) {
        diff = std::abs(lhs[k] - rhs[k]);
        at = k;
      }
    }
    results[3][i] = {diff / std::max(1e-300, inf_norm(rhs)), "component " + std::to_string(at)};
  });

  VerificationReport report;
  report.check = "structure";
  report.samples = samples;
  report.tolerance = tol;
  for (int c = 0; c < 4; ++c) report.absorb(summarise(names[c], tol, results[static_cast<std::size_t>(c)], state_of));
  return report;
}

namespace {

VerificationReport run_recursion(std::size_t n, int s_max, std::size_t samples, std::uint64_t seed, double tol,
                                 bool tower) {
  if (n == 0) throw InvalidArgument("n must be at least 1");
  if (s_max < 0) throw InvalidArgument("s_max must be non-negative");
  check_budget(n, s_max);
  auto state_of = [n, seed](std::size_t i) {
    auto rng = sample_rng(seed, i);
    return random_state(n, rng);
  };
  std::vector<SampleResult> rec(samples), inv0(samples), inv1(samples);

  parallel_for(samples, [&](std::size_t i) {
    const PeakonState st = state_of(i);
    std::vector<std::vector<double>> dH;
    for (int s = 0; s <= s_max; ++s) dH.push_back(grad_H(s, st));

    if (tower) {
      for (int s = 0; s < s_max; ++s) {
        const auto next = recursion_apply(st, dH[static_cast<std::size_t>(s)]);
        const auto& want = dH[static_cast<std::size_t>(s) + 1];
        double diff = 0.0;
        for (std::size_t k = 0; k < next.size(); ++k) diff = std::max(diff, std::abs(next[k] - want[k]));
        const double r = diff / std::max(1e-300, inf_norm(want));
        if (r > rec[i].residual || rec[i].detail.empty()) {
          rec[i] = {r, "S(dH" + std::to_string(s) + ") vs dH" + std::to_string(s + 1)};
        }
      }
    }

    const BivectorValue P[2] = {eval_P0(st), eval_P1(n)};
    std::vector<SampleResult>* out[2] = {&inv0, &inv1};
    for (int b = 0; b < 2; ++b) {
      SampleResult best{0.0, "no pairs"};
      for (int a = 0; a <= s_max; ++a) {
        for (int c = a + 1; c <= s_max; ++c) {
          const auto& da = dH[static_cast<std::size_t>(a)];
          const auto& dc = dH[static_cast<std::size_t>(c)];
          double scale = 0.0;
          for (std::size_t x = 0; x < da.size(); ++x) {
            for (std::size_t y = 0; y < dc.size(); ++y) scale += std::abs(P[b](x, y) * da[x] * dc[y]);
          }
          const double r = std::abs(poisson_bracket(P[b], da, dc)) / std::max(1e-300, scale);
          if (r > best.residual || best.detail == "no pairs") {
            best = {r, "{H" + std::to_string(a) + ",H" + std::to_string(c) + "}"};
          }
        }
      }
      (*out[b])[i] = best;
    }
  });

  VerificationReport report;
  report.check = tower ? "recursion" : "involution";
  report.samples = samples;
  report.tolerance = tol;
  if (tower && s_max > 0) report.absorb(summarise("S(dH_s)=dH_{s+1}", tol, rec, state_of));
  report.absorb(summarise("involution P0", tol, inv0, state_of));
  report.absorb(summarise("involution P1", tol, inv1, state_of));
  return report;
}

}  // namespace

VerificationReport verify_recursion(std::size_t n, int s_max, std::size_t samples, std::uint64_t seed, double tol) {
  return run_recursion(n, s_max, samples, seed, tol, true);
}

VerificationReport verify_involution(std::size_t n, int s_max, std::size_t samples, std::uint64_t seed, double tol) {
  return run_recursion(n, s_max, samples, seed, tol, false);
}

}  // namespace peakon
