#include "svm_instances.hpp"

#include "spectest/svm.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace spectest;

TEST(Shift, HandExamples) {
  Vector raw(3);
  raw << 1, -2, 0.5;
  const ShiftResult s = shift_values(raw, 0.1);
  EXPECT_NEAR(s.shift, 2.1, 1e-15);
  EXPECT_NEAR(s.shifted(0), 3.1, 1e-15);
  EXPECT_NEAR(s.shifted(1), 0.1, 1e-15);
  EXPECT_NEAR(s.shifted(2), 2.6, 1e-15);

  const ShiftResult zero = shift_values(Vector::Zero(4), 0.1);
  EXPECT_TRUE((zero.shifted.array() == 0.1).all());

  Vector single(1);
  single << -5;
  const ShiftResult one = shift_values(single, 0.1);
  EXPECT_NEAR(one.shift, 5.1, 1e-15);
  EXPECT_NEAR(one.shifted(0), 0.1, 1e-14);

  EXPECT_THROW(shift_values(Vector(0), 0.1), InvalidArgument);
}

TEST(TrainingSets, TwoClassLayoutSharesShift) {
  Matrix X(2, 1);
  X << 0, 1;
  Vector y(2), m(2);
  y << 1, -3;
  m << 0.5, 0.2;
  const ShiftedTrainingSet ts = make_two_class_set(X, y, m, 0.1);
  ASSERT_EQ(ts.size(), 4);
  EXPECT_NEAR(ts.shift, 3.1, 1e-15);
  EXPECT_EQ(ts.labels(0), 1);
  EXPECT_EQ(ts.labels(3), -1);
  EXPECT_EQ(ts.point_of[3], 1);
  EXPECT_NEAR(ts.magnitudes(1), 0.1, 1e-14);
  EXPECT_NEAR(ts.magnitudes(2), 3.6, 1e-14);
  EXPECT_GT(ts.magnitudes.minCoeff(), 0.0);
}

TEST(OneClass, BoxPinsSolution) {
  Matrix Q(2, 2);
  Q << 1, 0.3, 0.3, 2;
  const DualSolution s = solve_one_class_dual(Q, 1.0);
  EXPECT_NEAR(s.alpha(0), 0.5, 1e-12);
  EXPECT_NEAR(s.alpha(1), 0.5, 1e-12);
}

TEST(OneClass, TwoVariableClosedForm) {
  Matrix Q(2, 2);
  Q << 1, 0.2, 0.2, 1;
  const DualSolution s = solve_one_class_dual(Q, 0.5);
  EXPECT_NEAR(s.alpha(0), 0.5, 1e-9);
  EXPECT_NEAR(s.alpha(1), 0.5, 1e-9);
  EXPECT_NEAR(s.objective, 0.3, 1e-12);
}

TEST(OneClass, RejectsInfeasibleNu) {
  Matrix Q = Matrix::Identity(4, 4);
  EXPECT_THROW(solve_one_class_dual(Q, 0.2), InvalidArgument);
  EXPECT_THROW(solve_one_class_dual(Matrix::Identity(1, 1), 1.0), InvalidArgument);
  SvmConfig bad;
  bad.nu = 0.0;
  EXPECT_THROW(validate(bad), InvalidArgument);
}

TEST(OneClass, MatchesProjectedGradientOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const oracle::DualInstance inst = oracle::one_class_instance(seed, 20);
    SvmConfig cfg;
    cfg.nu = inst.nu;
    const Direction d = train_ocsvm(inst.set, inst.kernel, cfg);
    const oracle::QpResult ref = oracle::projected_gradient(inst.Q, inst.group, inst.totals, inst.cap);
    EXPECT_NEAR(d.objective, ref.objective, 1e-6) << "seed " << seed;
    EXPECT_LE(oracle::kkt_violation(inst.Q, d.alphas, inst.group, inst.cap), 1e-6);
    EXPECT_NEAR(d.alphas.sum(), 1.0, 1e-10);
    EXPECT_GE(d.alphas.minCoeff(), 0.0);
    EXPECT_LE(d.alphas.maxCoeff(), inst.cap);
  }
}

TEST(OneClass, WeightsAndSupport) {
  const oracle::DualInstance inst = oracle::one_class_instance(99);
  SvmConfig cfg;
  cfg.nu = inst.nu;
  const Direction d = train_ocsvm(inst.set, inst.kernel, cfg);
  ASSERT_GE(d.size(), 1);
  const double floor = 1e-8 * d.alphas.maxCoeff();
  Index expected = 0;
  for (Index i = 0; i < d.alphas.size(); ++i) expected += d.alphas(i) > floor;
  EXPECT_EQ(d.size(), expected);
  for (Index k = 0; k < d.size(); ++k) {
    const Index i = d.support_indices[std::size_t(k)];
    EXPECT_NEAR(d.weights(k), d.alphas(i) * inst.set.magnitudes(i), 1e-15);
    EXPECT_GT(std::abs(d.weights(k)), 0.0);
    EXPECT_EQ(d.support_points.row(k), inst.set.points.row(inst.set.point_of[std::size_t(i)]));
  }
}

TEST(OneClass, NuProperty) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const oracle::DualInstance inst = oracle::one_class_instance(seed, 25);
    SvmConfig cfg;
    cfg.nu = inst.nu;
    const Direction d = train_ocsvm(inst.set, inst.kernel, cfg);
    const double n = double(d.alphas.size());
    const double at_bound = (d.alphas.array() >= inst.cap * (1 - 1e-9)).cast<double>().sum();
    const double support = (d.alphas.array() > 0.0).cast<double>().sum();
    EXPECT_LE(at_bound / n, inst.nu + 1.0 / n);
    EXPECT_GE(support / n, inst.nu - 1.0 / n);
  }
}

TEST(OneClass, Deterministic) {
  const oracle::DualInstance inst = oracle::one_class_instance(5);
  SvmConfig cfg;
  cfg.nu = inst.nu;
  const Direction a = train_ocsvm(inst.set, inst.kernel, cfg);
  const Direction b = train_ocsvm(inst.set, inst.kernel, cfg);
  EXPECT_EQ(a.alphas, b.alphas);
}

TEST(OneClass, KernelScalingRescalesObjective) {
  const oracle::DualInstance inst = oracle::one_class_instance(6);
  const DualSolution a = solve_one_class_dual(inst.Q, inst.nu);
  const DualSolution b = solve_one_class_dual(3.0 * inst.Q, inst.nu);
  EXPECT_NEAR(b.objective, 3.0 * a.objective, 1e-6);
  std::set<Index> sa, sb;
  for (Index i = 0; i < a.alpha.size(); ++i) {
    if (a.alpha(i) > 1e-6) sa.insert(i);
    if (b.alpha(i) > 1e-6) sb.insert(i);
  }
  EXPECT_EQ(sa, sb);
}

TEST(NuSvc, TwoPointsPinned) {
  Matrix X(1, 2);
  X << 0.3, -0.2;
  Vector y(1), m(1);
  y << 1.0;
  m << -0.5;
  const ShiftedTrainingSet ts = make_two_class_set(X, y, m, 0.1);
  SvmConfig cfg;
  cfg.nu = 1.0;
  const Direction d = train_nu_svc(ts, make_kernel(1.0), cfg);
  ASSERT_EQ(d.size(), 2);
  EXPECT_NEAR(d.alphas(0), 0.5, 1e-12);
  EXPECT_NEAR(d.alphas(1), 0.5, 1e-12);
  EXPECT_NEAR(d.weights(0), 0.5 * ts.magnitudes(0), 1e-12);
  EXPECT_NEAR(d.weights(1), -0.5 * ts.magnitudes(1), 1e-12);
}

TEST(NuSvc, SymmetricFourPoints) {
  Matrix Q = 2.0 * Matrix::Identity(4, 4);
  Eigen::VectorXi labels(4);
  labels << 1, 1, -1, -1;
  const DualSolution s = solve_nu_svc_dual(Q, labels, 0.5);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(s.alpha(i), 0.125, 1e-9);
  EXPECT_NEAR(s.objective, 0.5 * 2.0 * 4 * 0.125 * 0.125, 1e-12);
}

TEST(NuSvc, RejectsBadInput) {
  Matrix Q = Matrix::Identity(4, 4);
  Eigen::VectorXi same(4);
  same << 1, 1, 1, 1;
  EXPECT_THROW(solve_nu_svc_dual(Q, same, 0.5), InvalidArgument);
  Eigen::VectorXi skewed(4);
  skewed << 1, -1, -1, -1;
  EXPECT_THROW(solve_nu_svc_dual(Q, skewed, 0.9), InvalidArgument);
  const oracle::DualInstance one = oracle::one_class_instance(3);
  EXPECT_THROW(train_nu_svc(one.set, one.kernel), InvalidArgument);
}

TEST(NuSvc, MatchesProjectedGradientOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const oracle::DualInstance inst = oracle::two_class_instance(seed, 10);
    SvmConfig cfg;
    cfg.nu = inst.nu;
    const Direction d = train_nu_svc(inst.set, inst.kernel, cfg);
    const oracle::QpResult ref = oracle::projected_gradient(inst.Q, inst.group, inst.totals, inst.cap);
    EXPECT_NEAR(d.objective, ref.objective, 1e-6) << "seed " << seed;
    EXPECT_LE(oracle::kkt_violation(inst.Q, d.alphas, inst.group, inst.cap), 1e-6);
    double signed_sum = 0.0;
    for (Index i = 0; i < d.alphas.size(); ++i) signed_sum += d.alphas(i) * inst.set.labels(i);
    EXPECT_NEAR(signed_sum, 0.0, 1e-10);
    EXPECT_NEAR(d.alphas.sum(), inst.nu, 1e-10);
    EXPECT_LE(d.alphas.maxCoeff(), inst.cap);
  }
}

TEST(NuSvc, WeightsCarryLabels) {
  const oracle::DualInstance inst = oracle::two_class_instance(77);
  SvmConfig cfg;
  cfg.nu = inst.nu;
  const Direction d = train_nu_svc(inst.set, inst.kernel, cfg);
  for (Index k = 0; k < d.size(); ++k) {
    const Index i = d.support_indices[std::size_t(k)];
    EXPECT_NEAR(d.weights(k), d.alphas(i) * inst.set.magnitudes(i) * inst.set.labels(i), 1e-15);
  }
}
