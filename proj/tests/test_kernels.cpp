#include "otnet/kernels.hpp"
#include "otnet/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace otnet;

namespace {

// k written out directly from its definition.
double k_direct(const Kernel& kernel, const Vector& x, const Vector& y) {
  const double r2 = (x - y).squaredNorm();
  if (kernel.kind() == Kernel::Kind::Gaussian) {
    return std::exp(-r2 / (2.0 * kernel.bandwidth() * kernel.bandwidth()));
  }
  return std::pow(kernel.c() + r2, kernel.beta());
}

Vector random_point(Stream& s, Index d) { return Vector::NullaryExpr(d, [&](Index) { return 1.5 * s.normal(); }); }

const std::vector<Kernel>& kernels() {
  static const std::vector<Kernel> all = {Kernel::gaussian(), Kernel::gaussian(0.7), Kernel::imq(),
                                          Kernel::imq(2.0, -0.3)};
  return all;
}

}  // namespace

TEST(KernelEval, GaussianAtCoincidentPoints) {
  for (Index d : {1, 2, 5}) {
    const Vector x = Vector::LinSpaced(d, -1.0, 2.0);
    const auto e = kernel_eval(Kernel::gaussian(), x, x);
    EXPECT_EQ(e.k, 1.0);
    EXPECT_EQ(e.grad_x, Vector::Zero(d));
    EXPECT_EQ(e.grad_y, Vector::Zero(d));
    EXPECT_EQ(e.trace_mixed, static_cast<double>(d));
  }
}

TEST(KernelEval, ImqAtCoincidentPoints) {
  for (Index d : {1, 3, 8}) {
    const Vector x = Vector::Constant(d, 0.4);
    const auto e = kernel_eval(Kernel::imq(1.0, -0.5), x, x);
    EXPECT_EQ(e.k, 1.0);
    EXPECT_EQ(e.grad_x, Vector::Zero(d));
    EXPECT_DOUBLE_EQ(e.trace_mixed, static_cast<double>(d));
  }
}

TEST(KernelEval, MatchesFiniteDifferences) {
  Stream s(StreamKey::from_seed(1));
  const double h1 = 1e-6, h2 = 1e-4;
  for (const auto& kernel : kernels()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Index d = 1 + trial % 4;
      const Vector x = random_point(s, d), y = random_point(s, d);
      const auto e = kernel_eval(kernel, x, y);
      EXPECT_NEAR(e.k, k_direct(kernel, x, y), 1e-15);
      double trace = 0.0;
      for (Index i = 0; i < d; ++i) {
        Vector xp = x, xm = x, yp = y, ym = y;
        xp(i) += h1;
        xm(i) -= h1;
        yp(i) += h1;
        ym(i) -= h1;
        EXPECT_NEAR(e.grad_x(i), (k_direct(kernel, xp, y) - k_direct(kernel, xm, y)) / (2 * h1), 1e-6);
        EXPECT_NEAR(e.grad_y(i), (k_direct(kernel, x, yp) - k_direct(kernel, x, ym)) / (2 * h1), 1e-6);
        // d^2 k / dx_i dy_i by a four-point stencil.
        Vector a = x, b = x;
        a(i) += h2;
        b(i) -= h2;
        Vector c = y, e2 = y;
        c(i) += h2;
        e2(i) -= h2;
        trace += (k_direct(kernel, a, c) - k_direct(kernel, a, e2) - k_direct(kernel, b, c) + k_direct(kernel, b, e2)) /
                 (4 * h2 * h2);
      }
      EXPECT_NEAR(e.trace_mixed, trace, 1e-6);
    }
  }
}

TEST(KernelEval, SymmetryAndAntisymmetricGradients) {
  Stream s(StreamKey::from_seed(2));
  for (const auto& kernel : kernels()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = random_point(s, 3), y = random_point(s, 3);
      const auto xy = kernel_eval(kernel, x, y);
      const auto yx = kernel_eval(kernel, y, x);
      EXPECT_EQ(xy.k, yx.k);
      EXPECT_EQ(xy.grad_x, -xy.grad_y);
      EXPECT_LT((xy.grad_x - yx.grad_y).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_EQ(xy.trace_mixed, yx.trace_mixed);
    }
  }
}

TEST(Kernel, BoundConstants) {
  EXPECT_EQ(Kernel::gaussian().k0(), 1.0);
  EXPECT_DOUBLE_EQ(Kernel::imq(4.0, -0.5).k0(), 0.5);
  Stream s(StreamKey::from_seed(3));
  for (const auto& kernel : kernels()) {
    for (int trial = 0; trial < 200; ++trial) {
      const Index d = 1 + trial % 5;
      const Vector x = random_point(s, d);
      const Vector y = trial % 2 ? random_point(s, d) : Vector(x + 0.3 * random_point(s, d));
      const auto e = kernel_eval(kernel, x, y);
      EXPECT_LE(kernel_eval(kernel, x, x).k, kernel.k0());
      const double k1 = kernel.k1(d);
      EXPECT_LE(std::abs(e.k), k1);
      EXPECT_LE(e.grad_x.norm(), k1 * (1 + 1e-12));
      EXPECT_LE(std::abs(e.trace_mixed), k1 * (1 + 1e-12));
    }
  }
}

TEST(Kernel, ProfileMatchesEvaluation) {
  for (const auto& kernel : kernels()) {
    Eigen::ArrayXd r2 = Eigen::ArrayXd::LinSpaced(7, 0.0, 6.0);
    Eigen::ArrayXd f, df, d2f;
    kernel.profile(r2, f, df, d2f);
    for (Index i = 0; i < r2.size(); ++i) {
      double fs, dfs, d2fs;
      kernel.profile(r2(i), fs, dfs, d2fs);
      EXPECT_NEAR(f(i), fs, 1e-15);
      EXPECT_NEAR(df(i), dfs, 1e-15);
      EXPECT_NEAR(d2f(i), d2fs, 1e-15);
      EXPECT_NEAR(kernel.value(r2(i)), fs, 1e-15);
      const double lo = std::max(0.0, r2(i) - 1e-5), hi = r2(i) + 1e-5;
      EXPECT_NEAR(dfs, (kernel.value(hi) - kernel.value(lo)) / (hi - lo), 1e-4);
    }
  }
}

TEST(Kernel, RejectsInvalidParameters) {
  EXPECT_THROW(Kernel::gaussian(0.0), ValidationError);
  EXPECT_THROW(Kernel::imq(0.0, -0.5), ValidationError);
  EXPECT_THROW(Kernel::imq(1.0, 0.0), ValidationError);
  EXPECT_THROW(Kernel::imq(1.0, -1.0), ValidationError);
  EXPECT_THROW(kernel_eval(Kernel::gaussian(), Vector::Zero(2), Vector::Zero(3)), ValidationError);
}
