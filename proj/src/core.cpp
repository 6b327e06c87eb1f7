#include "peakon/core.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "peakon/errors.hpp"

namespace peakon {

namespace {

// 1 - exp(-x) without cancellation for small x.
double one_minus_exp_neg(double x) { return -std::expm1(-x); }

}  // namespace

KernelMatrix kernel_matrix(std::span<const double> q) {
  const auto n = static_cast<Eigen::Index>(q.size());
  KernelMatrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::exp(-std::abs(q[i] - q[j]));
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

KernelMatrix kernel_matrix(const PeakonState& state) { return kernel_matrix(state.q()); }

double kernel_condition(const PeakonState& state) {
  const Eigen::SelfAdjointEigenSolver<KernelMatrix> eig(kernel_matrix(state), Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (ev.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / ev.minCoeff();
}

MetricMatrix metric_matrix(const PeakonState& state) {
  const double cond = kernel_condition(state);
  if (!(cond <= kMaxKernelCondition)) {
    throw DegeneracyError("kernel matrix is near-singular (condition number " + std::to_string(cond) + ")");
  }
  const KernelMatrix h = kernel_matrix(state);
  const Eigen::LLT<KernelMatrix> llt(h);
  if (llt.info() != Eigen::Success) throw DegeneracyError("kernel matrix is not positive definite");
  return llt.solve(KernelMatrix::Identity(h.rows(), h.cols()));
}

MetricMatrix metric_tridiagonal(const PeakonState& state) {
  const auto n = static_cast<Eigen::Index>(state.size());
  MetricMatrix g = MetricMatrix::Zero(n, n);
  if (n == 1) {
    g(0, 0) = 1.0;
    return g;
  }
  // r[i] = r_i, den[i] = 1 - r_i^2.
  std::vector<double> r(n - 1), den(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double d = state.q(i) - state.q(i + 1);
    r[i] = std::exp(-d);
    den[i] = one_minus_exp_neg(2.0 * d);
  }
  g(0, 0) = 1.0 / den[0];
  g(n - 1, n - 1) = 1.0 / den[n - 2];
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    g(i, i) = one_minus_exp_neg(2.0 * (state.q(i - 1) - state.q(i + 1))) / (den[i - 1] * den[i]);
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    g(i, i + 1) = -r[i] / den[i];
    g(i + 1, i) = g(i, i + 1);
  }
  return g;
}

double momentum(const PeakonState& state) {
  const auto p = state.p();
  return std::accumulate(p.begin(), p.end(), 0.0);
}

double energy(std::span<const double> q, std::span<const double> p) {
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    diag += p[i] * p[i];
    for (std::size_t j = i + 1; j < q.size(); ++j) off += p[i] * p[j] * std::exp(-std::abs(q[i] - q[j]));
  }
  return 0.5 * diag + off;
}

double energy(const PeakonState& state) { return energy(state.q(), state.p()); }

double transverse_coefficient(const PeakonState& state, std::size_t k) {
  const std::size_t n = state.size();
  if (n < 2 || k + 1 >= n) {
    throw InvalidArgument("pair index " + std::to_string(k) + " out of range for n=" + std::to_string(n));
  }
  const double s = state.q(k) - state.q(k + 1);
  if (!(s > 0.0)) throw DegeneracyError("coincident pair " + std::to_string(k));

  // With x_i = exp(q_i) normalised by x_k, a = x_k/x_{k-1}, r = x_{k+1}/x_k,
  // c = x_{k+2}/x_{k+1}; a missing neighbour contributes 0.
  const double a = k > 0 ? std::exp(-(state.q(k - 1) - state.q(k))) : 0.0;
  const double c = k + 2 < n ? std::exp(-(state.q(k + 1) - state.q(k + 2))) : 0.0;
  const double r = std::exp(-s);
  const double one_a2 = k > 0 ? one_minus_exp_neg(2.0 * (state.q(k - 1) - state.q(k))) : 1.0;
  const double one_c2 = k + 2 < n ? one_minus_exp_neg(2.0 * (state.q(k + 1) - state.q(k + 2))) : 1.0;

  const double num = 2.0 + 2.0 * a * a * r * c * c - (a * a + c * c) * (1.0 + r);
  return num / (one_a2 * one_minus_exp_neg(s) * one_c2);
}

}  // namespace peakon
