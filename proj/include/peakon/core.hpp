#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "peakon/state.hpp"

namespace peakon {

/// h_ij = exp(-|q_i - q_j|). Symmetric, unit diagonal, positive definite for distinct q.
using KernelMatrix = Eigen::MatrixXd;
/// g = h^{-1}; tridiagonal in the descending ordering.
using MetricMatrix = Eigen::MatrixXd;

/// Kernel matrices whose 2-norm condition number exceeds this are treated as singular.
inline constexpr double kMaxKernelCondition = 1e12;

KernelMatrix kernel_matrix(const PeakonState& state);
KernelMatrix kernel_matrix(std::span<const double> q);

/// 2-norm condition number of the kernel matrix.
double kernel_condition(const PeakonState& state);

/// Inverse of the kernel matrix, computed by Cholesky factorisation.
/// Throws DegeneracyError when the kernel condition number exceeds kMaxKernelCondition.
MetricMatrix metric_matrix(const PeakonState& state);

/// Closed-form tridiagonal metric, written in gap factors r_i = exp(-(q_i - q_{i+1})):
///   g_11 = 1/(1 - r_1^2),  g_nn = 1/(1 - r_{n-1}^2),
///   g_ii = (1 - r_{i-1}^2 r_i^2) / ((1 - r_{i-1}^2)(1 - r_i^2)),
///   g_{i,i+1} = -r_i / (1 - r_i^2).
MetricMatrix metric_tridiagonal(const PeakonState& state);

/// H_0 = sum_i p_i.
double momentum(const PeakonState& state);

/// H_1 = (1/2) p^T h p. Defined for any positions, coincident ones included.
double energy(const PeakonState& state);
double energy(std::span<const double> q, std::span<const double> p);

/// g(e_k - e_{k+1}, e_k - e_{k+1}) for the pair (k, k+1), 0-based, from its
/// closed form in the neighbouring gaps. Blows up like 2/s as s = q_k - q_{k+1} -> 0.
double transverse_coefficient(const PeakonState& state, std::size_t k);

}  // namespace peakon
