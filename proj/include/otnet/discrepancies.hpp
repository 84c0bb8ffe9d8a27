#pragma once

#include "otnet/kernels.hpp"
#include "otnet/measures.hpp"

namespace otnet {

/// Largest sample count accepted by the exact O(n^3) matcher.
inline constexpr Index kMaxMatchingSize = 2048;

/// W1 between two equal-size 1-D samples: mean |x_(i) - y_(i)| over order statistics.
double w1_1d(const Vector& p, const Vector& q);

/// W1 between two equal-size empirical measures by exact assignment on the
/// Euclidean cost matrix.
double w1_matching(const PointSet& p, const PointSet& q);

enum class MmdEstimator { Biased, Unbiased };

struct MmdResult {
  double value = 0.0;
  bool squared = false;  // unbiased results are the signed squared statistic
  MmdEstimator estimator = MmdEstimator::Biased;
};

/// Mean of k(x_i, y_j) over all pairs, or over i != j when `exclude_diagonal`
/// (x and y must then be the same set). Rows are processed in fixed blocks and
/// reduced in block order in long double, so the result does not depend on
/// the worker count.
double gram_mean(const PointSet& x, const PointSet& y, const Kernel& kernel, bool exclude_diagonal = false);

/// Raw MMD^2 estimate, not clamped.
double mmd_squared(const PointSet& p, const PointSet& q, const Kernel& kernel,
                   MmdEstimator estimator = MmdEstimator::Biased);

/// Biased: sqrt(max(MMD^2_b, 0)). Unbiased: signed MMD^2_u with squared = true.
MmdResult mmd(const PointSet& p, const PointSet& q, const Kernel& kernel,
              MmdEstimator estimator = MmdEstimator::Biased);

/// Stein kernel u_pi(x, y) =
///   s(x).s(y) k + s(x).grad_y k + s(y).grad_x k + tr(grad_x grad_y k).
double stein_u(const TargetSpec& target, const Kernel& kernel, const Eigen::Ref<const Vector>& x,
               const Eigen::Ref<const Vector>& y);

/// V-statistic (1/n^2) sum_ij u_pi(X_i, X_j), not clamped.
double ksd_squared(const PointSet& samples, const TargetSpec& target, const Kernel& kernel);

/// sqrt(max(ksd_squared, 0)).
double ksd(const PointSet& samples, const TargetSpec& target, const Kernel& kernel);

}  // namespace otnet
