#include "otnet/parallel.hpp"
#include "otnet/semidiscrete_ot.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace otnet;

namespace {

SourceSpec unit_interval() { return SourceSpec::uniform_box(Vector::Zero(1), Vector::Ones(1)); }

DiscreteMeasure two_atoms(double a, double b) {
  PointSet p(2, 1);
  p << a, b;
  return empirical_measure(p);
}

DualPotential psi2(double a, double b) {
  Vector v(2);
  v << a, b;
  return DualPotential(v);
}

Vector vec1(double x) { return Vector::Constant(1, x); }

// Cell boundary between atoms 0 and 1 in 1-D: where
// 1/2 (x - y0)^2 - psi0 = 1/2 (x - y1)^2 - psi1.
double boundary(double y0, double y1, const DualPotential& psi) {
  return (0.5 * (y1 * y1 - y0 * y0) + psi(0) - psi(1)) / (y1 - y0);
}

}  // namespace

TEST(Assign, Examples) {
  const auto nu = two_atoms(0.0, 1.0);
  EXPECT_EQ(assign(vec1(0.4), nu, psi2(0, 0)), 0);
  EXPECT_EQ(assign(vec1(0.5), nu, psi2(0, 0)), 0);
  EXPECT_EQ(assign(vec1(0.51), nu, psi2(0, 0)), 1);
  EXPECT_EQ(assign(vec1(0.6), nu, psi2(0.2, 0)), 0);
  EXPECT_EQ(assign(vec1(0.71), nu, psi2(0.2, 0)), 1);
}

TEST(Assign, BatchMatchesPointwise) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(3), 37, std::uint64_t{1}));
  Vector psi_values(37);
  Stream s(StreamKey::from_seed(2));
  for (Index j = 0; j < 37; ++j) psi_values(j) = s.normal();
  const DualPotential psi(psi_values);
  const PointSet x = sample(SourceSpec::standard_gaussian(3), 500, std::uint64_t{3});
  const Eigen::VectorXi batch = assign_batch(x, nu, psi);
  for (Index i = 0; i < x.rows(); ++i) {
    // Oracle: literal argmin of the power cost.
    Index best = 0;
    double best_cost = 0.0;
    for (Index j = 0; j < nu.size(); ++j) {
      const double c = 0.5 * (x.row(i) - nu.points().row(j)).squaredNorm() - psi(j);
      if (j == 0 || c < best_cost) {
        best = j;
        best_cost = c;
      }
    }
    EXPECT_EQ(batch(i), best);
    EXPECT_EQ(assign(x.row(i).transpose(), nu, psi), best);
  }
}

TEST(DualValue, UniformTwoAtoms) {
  const auto est = dual_value_mc(unit_interval(), two_atoms(0, 1), psi2(0, 0), 100000, std::uint64_t{1});
  EXPECT_GT(est.std_error, 0.0);
  EXPECT_LE(std::abs(est.value - 1.0 / 24.0), 3.0 * est.std_error);
}

TEST(DualValue, SingleAtom) {
  PointSet p = PointSet::Zero(1, 1);
  const auto est = dual_value_mc(unit_interval(), empirical_measure(p), DualPotential::zeros(1), 100000,
                                 std::uint64_t{2});
  EXPECT_LE(std::abs(est.value - 1.0 / 6.0), 3.0 * est.std_error);
}

TEST(DualValue, ShiftInvariantUnderCommonRandomNumbers) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 16, std::uint64_t{4}));
  Vector v(16);
  Stream s(StreamKey::from_seed(5));
  for (Index j = 0; j < 16; ++j) v(j) = 0.3 * s.normal();
  const auto source = SourceSpec::standard_gaussian(2);
  const double base = dual_value_mc(source, nu, DualPotential(v), 20000, std::uint64_t{6}).value;
  for (double c : {-3.0, -0.1, 0.25, 7.0}) {
    const DualPotential shifted(Vector(v.array() + c));
    const double moved = dual_value_mc(source, nu, shifted, 20000, std::uint64_t{6}).value;
    // Exact in real arithmetic; only roundoff in the two sums remains.
    EXPECT_NEAR(moved, base, 1e-12);
    const PointSet x = sample(source, 200, std::uint64_t{7});
    EXPECT_EQ(assign_batch(x, nu, DualPotential(v)), assign_batch(x, nu, shifted));
  }
}

TEST(DualGradient, UniformExamples) {
  const auto nu = two_atoms(0, 1);
  const Vector g0 = dual_gradient_mc(unit_interval(), nu, psi2(0, 0), 100000, std::uint64_t{1});
  EXPECT_NEAR(g0(0), 0.0, 0.01);
  EXPECT_NEAR(g0(1), 0.0, 0.01);
  const Vector g1 = dual_gradient_mc(unit_interval(), nu, psi2(0.2, 0), 100000, std::uint64_t{1});
  EXPECT_NEAR(g1(0), -0.2, 0.01);
  EXPECT_NEAR(g1(1), 0.2, 0.01);
}

TEST(DualGradient, SumsToZero) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 50, std::uint64_t{8}));
  Vector v(50);
  Stream s(StreamKey::from_seed(9));
  for (Index j = 0; j < 50; ++j) v(j) = s.normal();
  const Vector g = dual_gradient_mc(SourceSpec::standard_gaussian(2), nu, DualPotential(v), 12345, std::uint64_t{1});
  EXPECT_LE(std::abs(g.sum()), 1e-14);
}

TEST(DualGradient, IndependentOfWorkerCount) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 20, std::uint64_t{8}));
  const auto source = SourceSpec::standard_gaussian(2);
  set_worker_count(1);
  const Vector a = dual_gradient_mc(source, nu, DualPotential::zeros(20), 30000, std::uint64_t{2});
  const double fa = dual_value_mc(source, nu, DualPotential::zeros(20), 30000, std::uint64_t{2}).value;
  set_worker_count(4);
  const Vector b = dual_gradient_mc(source, nu, DualPotential::zeros(20), 30000, std::uint64_t{2});
  const double fb = dual_value_mc(source, nu, DualPotential::zeros(20), 30000, std::uint64_t{2}).value;
  set_worker_count(0);
  EXPECT_EQ(a, b);
  EXPECT_EQ(fa, fb);
}

TEST(DualGradient, MatchesFiniteDifferenceOfValue) {
  const auto nu = two_atoms(0, 1);
  const auto source = unit_interval();
  Stream s(StreamKey::from_seed(10));
  const double h = 1e-3;
  for (int trial = 0; trial < 5; ++trial) {
    const Vector v = Vector::NullaryExpr(2, [&](Index) { return 0.4 * (s.uniform() - 0.5); });
    const Vector g = dual_gradient_mc(source, nu, DualPotential(v), 1000000, std::uint64_t{77});
    for (Index i = 0; i < 2; ++i) {
      Vector vp = v, vm = v;
      vp(i) += h;
      vm(i) -= h;
      const double fp = dual_value_mc(source, nu, DualPotential(vp), 1000000, std::uint64_t{77}).value;
      const double fm = dual_value_mc(source, nu, DualPotential(vm), 1000000, std::uint64_t{77}).value;
      EXPECT_NEAR((fp - fm) / (2.0 * h), g(i), 1e-2);
    }
  }
}

TEST(DualValue, MidpointConcavity) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 8, std::uint64_t{12}));
  const auto source = SourceSpec::standard_gaussian(2);
  Stream s(StreamKey::from_seed(13));
  for (int trial = 0; trial < 20; ++trial) {
    const Vector a = Vector::NullaryExpr(8, [&](Index) { return s.normal(); });
    const Vector b = Vector::NullaryExpr(8, [&](Index) { return s.normal(); });
    const auto key = StreamKey::from_seed(100 + static_cast<std::uint64_t>(trial));
    const auto fa = dual_value_mc(source, nu, DualPotential(a), 20000, key);
    const auto fb = dual_value_mc(source, nu, DualPotential(b), 20000, key);
    const auto fm = dual_value_mc(source, nu, DualPotential(0.5 * (a + b)), 20000, key);
    const double se = std::sqrt(fa.std_error * fa.std_error + fb.std_error * fb.std_error + fm.std_error * fm.std_error);
    EXPECT_GE(fm.value, 0.5 * fa.value + 0.5 * fb.value - 3.0 * se);
  }
}

TEST(Solve, UniformTwoAtomBoundary) {
  SolverConfig config;
  config.mc_batch = 10000;
  config.max_iters = 10000;
  config.seed = 1;
  const auto nu = two_atoms(0, 1);
  const auto report = solve(unit_interval(), nu, config);
  EXPECT_TRUE(report.converged);
  EXPECT_LE(report.iterations, config.max_iters);
  EXPECT_NEAR(boundary(0, 1, report.psi), 0.5, 0.01);
  EXPECT_NEAR(report.psi.values().mean(), 0.0, 1e-15);
  EXPECT_NEAR(report.dual_value, 1.0 / 24.0, 0.01);

  // Transport at the optimum.
  EXPECT_EQ(transport(vec1(0.3), nu, report.psi)(0), 0.0);
  EXPECT_EQ(transport(vec1(0.8), nu, report.psi)(0), 1.0);
}

TEST(Solve, GaussianSourceSymmetricAtoms) {
  SolverConfig config;
  config.seed = 2;
  const auto nu = two_atoms(-1, 1);
  const auto report = solve(SourceSpec::standard_gaussian(1), nu, config);
  EXPECT_TRUE(report.converged);
  EXPECT_NEAR(boundary(-1, 1, report.psi), 0.0, 0.01);
}

TEST(Solve, SingleAtom) {
  PointSet p(1, 2);
  p << 0.3, -0.7;
  const auto nu = empirical_measure(p);
  const auto report = solve(SourceSpec::standard_gaussian(2), nu, SolverConfig{});
  EXPECT_TRUE(report.converged);
  EXPECT_EQ(report.iterations, 0);
  EXPECT_EQ(report.psi.values(), Vector::Zero(1));
  EXPECT_EQ(dual_gradient_mc(SourceSpec::standard_gaussian(2), nu, report.psi, 1000, std::uint64_t{1}),
            Vector::Zero(1));
  EXPECT_EQ(transport(Vector::Ones(2), nu, report.psi), p.row(0).transpose());
}

TEST(Solve, DeterministicAndWorkerIndependent) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 16, std::uint64_t{3}));
  SolverConfig config;
  config.max_iters = 300;
  config.mc_batch = 2000;
  config.seed = 5;
  set_worker_count(1);
  const auto a = solve(SourceSpec::standard_gaussian(2), nu, config);
  set_worker_count(3);
  const auto b = solve(SourceSpec::standard_gaussian(2), nu, config);
  set_worker_count(0);
  EXPECT_EQ(a.psi.values(), b.psi.values());
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.grad_norm, b.grad_norm);
}

TEST(Solve, ReachesTargetMassesInTwoDimensions) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 12, std::uint64_t{21}));
  SolverConfig config;
  config.step0 = 5.0;
  config.grad_tol = 3e-3;
  config.validation_batch = 100000;
  config.seed = 3;
  const auto source = SourceSpec::standard_gaussian(2);
  const auto report = solve(source, nu, config);
  ASSERT_TRUE(report.converged);
  const Vector g = dual_gradient_mc(source, nu, report.psi, 100000, std::uint64_t{999});
  // sd of each fresh mass estimate is about sqrt(nu(1-nu)/1e5) ~ 8.7e-4.
  EXPECT_LE(g.lpNorm<Eigen::Infinity>(), config.grad_tol + 4.0 * 8.7e-4);
}

TEST(Solve, RejectsBadInput) {
  PointSet p(2, 1);
  p << 0.0, 1.0;
  Vector w(2);
  w << 1.0, 0.0;
  EXPECT_THROW(solve(unit_interval(), DiscreteMeasure(p, w), SolverConfig{}), ValidationError);
  EXPECT_THROW(solve(SourceSpec::standard_gaussian(2), two_atoms(0, 1), SolverConfig{}), ValidationError);
  SolverConfig bad;
  bad.grad_tol = 1.5;
  EXPECT_THROW(solve(unit_interval(), two_atoms(0, 1), bad), ValidationError);
  bad = SolverConfig{};
  bad.step0 = 0.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = SolverConfig{};
  bad.mc_batch = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(Solve, NonConvergenceIsReported) {
  SolverConfig config;
  config.max_iters = 5;
  config.check_every = 5;
  config.grad_tol = 1e-9;
  const auto report = solve(unit_interval(), two_atoms(0, 1), config);
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.iterations, 5);
  EXPECT_GT(report.grad_norm, config.grad_tol);
}

TEST(Brenier, Coefficients) {
  const auto phi = brenier_coefficients(two_atoms(0, 1), psi2(0, 0));
  EXPECT_EQ(phi.offsets(0), 0.0);
  EXPECT_EQ(phi.offsets(1), -0.5);
  EXPECT_EQ(phi.slopes(1, 0), 1.0);

  PointSet origin = PointSet::Zero(1, 3);
  EXPECT_EQ(brenier_coefficients(empirical_measure(origin), DualPotential(vec1(0.7))).offsets(0), 0.7);
}

TEST(Brenier, ShiftMovesOffsetsOnly) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 10, std::uint64_t{1}));
  Vector v = Vector::LinSpaced(10, -1.0, 1.0);
  const auto a = brenier_coefficients(nu, DualPotential(v));
  const auto b = brenier_coefficients(nu, DualPotential(Vector(v.array() + 2.5)));
  EXPECT_LT(((b.offsets - a.offsets).array() - 2.5).abs().maxCoeff(), 1e-14);
  const PointSet x = sample(SourceSpec::standard_gaussian(2), 100, std::uint64_t{2});
  for (Index i = 0; i < x.rows(); ++i) EXPECT_EQ(a.argmax(x.row(i).transpose()), b.argmax(x.row(i).transpose()));
}

TEST(Brenier, GradientEqualsTransport) {
  const auto nu = empirical_measure(sample(TargetSpec::standard_normal(2), 32, std::uint64_t{4}));
  SolverConfig config;
  config.max_iters = 500;
  config.step0 = 5.0;
  const auto report = solve(SourceSpec::standard_gaussian(2), nu, config);
  const auto phi = brenier_coefficients(nu, report.psi);
  const PointSet x = sample(SourceSpec::standard_gaussian(2), 2000, std::uint64_t{5});
  const Eigen::VectorXi cells = assign_batch(x, nu, report.psi);
  for (Index i = 0; i < x.rows(); ++i) {
    const Vector xi = x.row(i).transpose();
    EXPECT_EQ(phi.argmax(xi), cells(i));
    EXPECT_EQ(gradient(phi, xi), transport(xi, nu, report.psi));
  }
}

TEST(Transport, TieGoesToSmallestIndex) {
  const auto nu = two_atoms(0, 1);
  EXPECT_EQ(transport(vec1(0.5), nu, psi2(0, 0))(0), 0.0);
}
