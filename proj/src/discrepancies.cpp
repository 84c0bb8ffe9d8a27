#include "otnet/discrepancies.hpp"

#include "otnet/assignment.hpp"
#include "otnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace otnet {

namespace {

constexpr Index kRowBlock = 16;

using Array = Eigen::ArrayXd;

/// Squared distances from x_i to rows [from, end) of `cols` (column-major copy), into `r2`.
template <typename Out>
void squared_distances(const Matrix& cols, const PointSet& x, Index i, Index from, Out&& r2) {
  r2.setZero();
  const Index len = cols.rows() - from;
  for (Index k = 0; k < cols.cols(); ++k) r2 += (cols.col(k).tail(len).array() - x(i, k)).square();
}

/// Sum of k over a row of squared distances, without temporaries.
template <typename Derived>
long double kernel_row_sum(const Kernel& kernel, const Eigen::ArrayBase<Derived>& r2) {
  if (kernel.kind() == Kernel::Kind::Gaussian) {
    return (r2 * (-0.5 / (kernel.bandwidth() * kernel.bandwidth()))).exp().sum();
  }
  return (r2 + kernel.c()).pow(kernel.beta()).sum();
}

long double sum_blocks(const std::vector<long double>& partial) {
  long double total = 0.0L;
  for (long double p : partial) total += p;
  return total;
}

}  // namespace

double w1_1d(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) throw ValidationError("w1_1d: sample counts differ");
  if (p.size() == 0) throw ValidationError("w1_1d: empty samples");
  std::vector<double> a(p.data(), p.data() + p.size());
  std::vector<double> b(q.data(), q.data() + q.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  long double total = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return static_cast<double>(total / static_cast<long double>(a.size()));
}

double w1_matching(const PointSet& p, const PointSet& q) {
  if (p.rows() != q.rows()) throw ValidationError("w1_matching: sample counts differ");
  if (p.cols() != q.cols()) throw ValidationError("w1_matching: dimensions differ");
  if (p.rows() == 0) throw ValidationError("w1_matching: empty samples");
  if (p.rows() > kMaxMatchingSize) {
    throw ValidationError("w1_matching: " + std::to_string(p.rows()) + " points exceeds the exact-matching cap of " +
                          std::to_string(kMaxMatchingSize) + "; subsample both sets first");
  }
  const Index n = p.rows();
  Matrix cost(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) cost(i, j) = (p.row(i) - q.row(j)).norm();
  }
  return solve_assignment(cost).cost / static_cast<double>(n);
}

double gram_mean(const PointSet& x, const PointSet& y, const Kernel& kernel, bool exclude_diagonal) {
  if (x.cols() != y.cols()) throw ValidationError("gram_mean: dimensions differ");
  if (exclude_diagonal && x.rows() != y.rows()) throw ValidationError("gram_mean: diagonal needs a square Gram matrix");
  const Index n = x.rows(), m = y.rows();
  const Matrix cols = y;
  // A set against itself: sum the strict upper triangle once and double it.
  const bool same = x.data() == y.data() && n == m;
  const double diagonal = exclude_diagonal ? 0.0 : kernel.value(0.0);
  const auto partial = map_blocks<long double>(n, kRowBlock, [&](Index begin, Index end) {
    long double acc = 0.0L;
    Array r2(m);
    for (Index i = begin; i < end; ++i) {
      if (same) {
        const Index len = m - i - 1;
        squared_distances(cols, x, i, i + 1, r2.head(len));
        acc += 2.0L * kernel_row_sum(kernel, r2.head(len)) + diagonal;
      } else {
        squared_distances(cols, x, i, 0, r2);
        acc += kernel_row_sum(kernel, r2);
        if (exclude_diagonal) acc -= kernel.value(0.0);
      }
    }
    return acc;
  });
  const long double pairs =
      exclude_diagonal ? static_cast<long double>(n) * (n - 1) : static_cast<long double>(n) * m;
  return static_cast<double>(sum_blocks(partial) / pairs);
}

double mmd_squared(const PointSet& p, const PointSet& q, const Kernel& kernel, MmdEstimator estimator) {
  if (p.cols() != q.cols()) throw ValidationError("mmd: dimensions differ");
  const bool unbiased = estimator == MmdEstimator::Unbiased;
  if (unbiased && (p.rows() < 2 || q.rows() < 2)) throw ValidationError("mmd: unbiased estimator needs n, m >= 2");
  if (p.rows() < 1 || q.rows() < 1) throw ValidationError("mmd: empty sample");
  return gram_mean(p, p, kernel, unbiased) + gram_mean(q, q, kernel, unbiased) - 2.0 * gram_mean(p, q, kernel);
}

MmdResult mmd(const PointSet& p, const PointSet& q, const Kernel& kernel, MmdEstimator estimator) {
  const double sq = mmd_squared(p, q, kernel, estimator);
  if (estimator == MmdEstimator::Unbiased) return {sq, true, estimator};
  return {std::sqrt(std::max(sq, 0.0)), false, estimator};
}

double stein_u(const TargetSpec& target, const Kernel& kernel, const Eigen::Ref<const Vector>& x,
               const Eigen::Ref<const Vector>& y) {
  if (x.size() != target.dim() || y.size() != target.dim()) throw ValidationError("stein_u: dimension mismatch");
  const Vector sx = target.score(x);
  const Vector sy = target.score(y);
  const auto k = kernel_eval(kernel, x, y);
  return sx.dot(sy) * k.k + sx.dot(k.grad_y) + sy.dot(k.grad_x) + k.trace_mixed;
}

double ksd_squared(const PointSet& samples, const TargetSpec& target, const Kernel& kernel) {
  if (samples.rows() < 1) throw ValidationError("ksd: empty sample");
  if (samples.cols() != target.dim()) throw ValidationError("ksd: dimension mismatch");
  const Index n = samples.rows(), d = samples.cols();
  PointSet scores(n, d);
  for (Index i = 0; i < n; ++i) scores.row(i) = target.score(samples.row(i).transpose()).transpose();
  const Matrix xc = samples;
  const Matrix sc = scores;

  // With k = f(r^2): grad_x k = 2 f' (x - y) = -grad_y k and
  // tr(grad_x grad_y k) = -2 d f' - 4 r^2 f''.
  const auto partial = map_blocks<long double>(n, kRowBlock, [&](Index begin, Index end) {
    long double acc = 0.0L;
    for (Index i = begin; i < end; ++i) {
      Array r2 = Array::Zero(n), ss = Array::Zero(n), cross = Array::Zero(n);
      for (Index k = 0; k < d; ++k) {
        const auto dx = samples(i, k) - xc.col(k).array();
        const auto ds = scores(i, k) - sc.col(k).array();
        r2 += dx.square();
        ss += scores(i, k) * sc.col(k).array();
        cross += ds * dx;
      }
      Array f, df, d2f;
      kernel.profile(r2, f, df, d2f);
      const Array u = f * ss - 2.0 * df * cross - 2.0 * static_cast<double>(d) * df - 4.0 * r2 * d2f;
      acc += u.sum();
    }
    return acc;
  });
  return static_cast<double>(sum_blocks(partial) / (static_cast<long double>(n) * n));
}

double ksd(const PointSet& samples, const TargetSpec& target, const Kernel& kernel) {
  return std::sqrt(std::max(ksd_squared(samples, target, kernel), 0.0));
}

}  // namespace otnet
