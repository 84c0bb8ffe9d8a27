#pragma once

#include "otnet/types.hpp"

#include <cmath>
#include <string>

namespace otnet {

/// Radial kernel k(x, y) = f(|x - y|^2): gaussian exp(-r^2 / (2 sigma^2)) or
/// inverse multiquadric (c + r^2)^beta with c > 0, beta in (-1, 0).
class Kernel {
 public:
  enum class Kind { Gaussian, InverseMultiquadric };

  static Kernel gaussian(double bandwidth = 1.0) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ValidationError("gaussian kernel: bandwidth must be > 0");
    return Kernel(Kind::Gaussian, bandwidth, 0.0, 0.0);
  }
  static Kernel imq(double c = 1.0, double beta = -0.5) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("imq kernel: c must be > 0");
    if (!(beta > -1.0 && beta < 0.0)) throw ValidationError("imq kernel: beta must lie in (-1, 0)");
    return Kernel(Kind::InverseMultiquadric, 0.0, c, beta);
  }

  Kind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }
  double c() const { return c_; }
  double beta() const { return beta_; }
  std::string name() const { return kind_ == Kind::Gaussian ? "gaussian" : "imq"; }

  /// f(r2), f'(r2), f''(r2) with derivatives taken in r2 = |x - y|^2.
  template <typename T>
  void profile(const T& r2, T& f, T& df, T& d2f) const {
    using std::exp;
    using std::pow;
    if (kind_ == Kind::Gaussian) {
      const double s2 = bandwidth_ * bandwidth_;
      f = exp(-r2 / (2.0 * s2));
      df = -f / (2.0 * s2);
      d2f = f / (4.0 * s2 * s2);
    } else {
      const T base = c_ + r2;
      f = pow(base, beta_);
      df = beta_ * f / base;
      d2f = (beta_ - 1.0) * df / base;
    }
  }

  template <typename T>
  T value(const T& r2) const {
    using std::exp;
    using std::pow;
    return kind_ == Kind::Gaussian ? T(exp(-r2 / (2.0 * bandwidth_ * bandwidth_))) : T(pow(c_ + r2, beta_));
  }

  /// sup_x k(x, x).
  double k0() const { return kind_ == Kind::Gaussian ? 1.0 : std::pow(c_, beta_); }

  /// Bound on |k|, |grad_x k|, |grad_y k| and |tr grad_x grad_y k| over all
  /// pairs in dimension d.
  double k1(Index d) const {
    const double dd = static_cast<double>(d);
    if (kind_ == Kind::Gaussian) {
      const double s2 = bandwidth_ * bandwidth_;
      return std::max({1.0, std::exp(-0.5) / bandwidth_, dd / s2});
    }
    // r (c + r^2)^(beta - 1) peaks at r^2 = c / (1 - 2 beta).
    const double r_star = std::sqrt(c_ / (1.0 - 2.0 * beta_));
    const double grad = 2.0 * std::abs(beta_) * r_star * std::pow(c_ + r_star * r_star, beta_ - 1.0);
    const double trace = 2.0 * std::abs(beta_) * std::pow(c_, beta_ - 1.0) * (dd + 2.0 * (1.0 - beta_));
    return std::max({k0(), grad, trace});
  }

 private:
  Kernel(Kind kind, double bandwidth, double c, double beta) : kind_(kind), bandwidth_(bandwidth), c_(c), beta_(beta) {}

  Kind kind_;
  double bandwidth_;
  double c_;
  double beta_;
};

template <typename Scalar>
struct KernelEval {
  Scalar k;
  VectorX<Scalar> grad_x;
  VectorX<Scalar> grad_y;
  Scalar trace_mixed;  // tr(grad_x grad_y k)
};

/// Closed-form k, its first derivatives and the mixed-Hessian trace.
template <typename DerivedX, typename DerivedY>
KernelEval<typename DerivedX::Scalar> kernel_eval(const Kernel& kernel, const Eigen::MatrixBase<DerivedX>& x,
                                                  const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw ValidationError("kernel_eval: dimension mismatch");
  const VectorX<Scalar> diff = (x.derived() - y.derived()).transpose().reshaped();
  const Scalar r2 = diff.squaredNorm();
  const Scalar d = static_cast<Scalar>(diff.size());
  KernelEval<Scalar> out;
  if (kernel.kind() == Kernel::Kind::Gaussian) {
    const Scalar s2 = kernel.bandwidth() * kernel.bandwidth();
    out.k = std::exp(-r2 / (2 * s2));
    out.grad_x = -diff * (out.k / s2);
    out.grad_y = diff * (out.k / s2);
    out.trace_mixed = (d / s2 - r2 / (s2 * s2)) * out.k;
  } else {
    const Scalar beta = kernel.beta();
    const Scalar base = kernel.c() + r2;
    out.k = std::pow(base, beta);
    out.grad_x = diff * (2 * beta * std::pow(base, beta - 1));
    out.grad_y = -out.grad_x;
    out.trace_mixed = -2 * beta * (d * std::pow(base, beta - 1) + 2 * (beta - 1) * r2 * std::pow(base, beta - 2));
  }
  return out;
}

}  // namespace otnet
