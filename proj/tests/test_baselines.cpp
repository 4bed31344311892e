#include "oracles.hpp"

#include "spectest/baselines.hpp"
#include "spectest/simulation.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace spectest;

namespace {

Dataset dgp(DgpId id, Index q, Index n, std::uint64_t seed) {
  DgpSpec s{id, q, n};
  Rng rng(seed);
  return gen_dgp(s, rng);
}

Vector random_vector(Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

}  // namespace

TEST(VStatistic, HandExamples) {
  EXPECT_EQ(v_statistic(Vector::Zero(3), Matrix::Ones(3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(v_statistic(Vector::Ones(2), Matrix::Ones(2, 2)), 2.0);
  EXPECT_THROW(v_statistic(Vector::Ones(2), Matrix::Ones(3, 3)), InvalidArgument);
}

TEST(VStatistic, MatchesDoubleLoop) {
  const Dataset d = dgp(DgpId::d1, 10, 60, 1);
  const Matrix K = gram(d.X, median_heuristic(d.X));
  const Vector e = random_vector(60, 2);
  EXPECT_NEAR(v_statistic(e, K), oracle::v_statistic(e, K), 1e-10);
  Matrix U(60, 3);
  for (Index b = 0; b < 3; ++b) U.col(b) = random_vector(60, 10 + b);
  const Vector cols = v_statistic_columns(U, K);
  for (Index b = 0; b < 3; ++b) EXPECT_NEAR(cols(b), oracle::v_statistic(U.col(b), K), 1e-10);
}

TEST(VStatistic, NonNegativeForGaussianKernel) {
  const Dataset d = dgp(DgpId::d1, 10, 80, 3);
  const Matrix K = gram(d.X, make_kernel(0.7));
  for (std::uint64_t s = 0; s < 20; ++s) EXPECT_GE(v_statistic(random_vector(80, 100 + s), K), -1e-10);
}

TEST(Baselines, KcmAndGpAgreeWithTrivialProjector) {
  const Dataset d = dgp(DgpId::d1, 10, 50, 4);
  const Matrix K = gram(d.X, median_heuristic(d.X));
  const Vector e = random_vector(50, 5);
  const Projector identity(Matrix(50, 0));
  const BootstrapConfig boot{100, Multiplier::mammen, 7};
  const VStatResult kcm = multiplier_vstat_test(e, K, nullptr, boot, {0.05});
  const VStatResult gp = multiplier_vstat_test(e, K, &identity, boot, {0.05});
  EXPECT_NEAR(kcm.stat, gp.stat, 1e-12);
  EXPECT_NEAR(kcm.boot_crit.at(0.05), gp.boot_crit.at(0.05), 1e-12);
  EXPECT_EQ(kcm.p_bootstrap, gp.p_bootstrap);
}

TEST(Baselines, GpWithOnesProjectorIsKcmOnCenteredResiduals) {
  const Dataset d = dgp(DgpId::d1, 10, 50, 6);
  const Matrix K = gram(d.X, median_heuristic(d.X));
  const Vector e = random_vector(50, 8);
  const Vector centered = e.array() - e.mean();
  const Projector ones(Matrix::Ones(50, 1));
  const BootstrapConfig boot{10, Multiplier::mammen, 9};
  const VStatResult gp = multiplier_vstat_test(e, K, &ones, boot, {0.05});
  EXPECT_NEAR(gp.stat, v_statistic(centered, K), 1e-12);
  EXPECT_EQ(gp.residual_mode, ResidualMode::projected);
}

TEST(Baselines, ZeroResiduals) {
  Dataset d = dgp(DgpId::d1, 10, 60, 10);
  d.y = d.X * Vector::LinSpaced(10, 1, 2);
  BaselineOptions o;
  o.bootstrap.B = 50;
  const VStatResult icm = icm_test(d, o);
  EXPECT_NEAR(icm.stat, 0.0, 1e-20);
  EXPECT_LE(icm.boot_crit.at(0.05), 1e-20);
  EXPECT_NEAR(kcm_test(d, o).stat, 0.0, 1e-20);
}

TEST(Baselines, DefaultsAndFields) {
  const Dataset d = dgp(DgpId::d3, 10, 120, 11);
  BaselineOptions o;
  o.bootstrap = BootstrapConfig{99, Multiplier::mammen, 12};
  const VStatResult icm = icm_test(d, o);
  EXPECT_EQ(icm.sigma, 2.0);
  EXPECT_EQ(icm.kind, BaselineKind::icm);
  EXPECT_EQ(icm.residual_mode, ResidualMode::raw);
  const VStatResult kcm = kcm_test(d, o);
  EXPECT_NEAR(kcm.sigma, oracle::median_pairwise_distance(d.X), 1e-10);
  const VStatResult gp = gp_test(d, o);
  EXPECT_EQ(gp.residual_mode, ResidualMode::projected);
  for (const VStatResult* r : {&icm, &kcm, &gp}) {
    EXPECT_EQ(r->B, 99);
    EXPECT_GE(r->p_bootstrap, 1.0 / 100.0);
    EXPECT_LE(r->p_bootstrap, 1.0);
    EXPECT_GE(r->stat, 0.0);
    EXPECT_EQ(r->boot_crit.size(), 3u);
  }
  EXPECT_THROW(rejects(kcm, 0.2), InvalidArgument);
}

TEST(Baselines, Deterministic) {
  const Dataset d = dgp(DgpId::d2, 10, 100, 13);
  BaselineOptions o;
  o.bootstrap = BootstrapConfig{50, Multiplier::rademacher, 14};
  EXPECT_EQ(gp_test(d, o).p_bootstrap, gp_test(d, o).p_bootstrap);
  EXPECT_EQ(icm_test(d, o).boot_crit, icm_test(d, o).boot_crit);
}

TEST(Baselines, UpperTailPValue) {
  const Matrix K = Matrix::Identity(4, 4);
  Vector e(4);
  e << 1, 1, 1, 1;
  const VStatResult r = multiplier_vstat_test(e, K, nullptr, {5, Multiplier::unit, 0}, {0.5});
  // Every draw equals the statistic, so all five count as at least as large.
  EXPECT_NEAR(r.p_bootstrap, 1.0, 1e-15);
  EXPECT_FALSE(rejects(r, 0.5));
}

TEST(Baselines, IcmMatchesExplicitRefits) {
  const Dataset d = dgp(DgpId::d2, 10, 80, 15);
  BaselineOptions o;
  o.bootstrap = BootstrapConfig{40, Multiplier::mammen, 16};
  o.levels = {0.10, 0.05};
  const VStatResult icm = icm_test(d, o);

  const Vector theta = oracle::ols(d.X, d.y);
  const Vector fitted = d.X * theta;
  const Vector eps = d.y - fitted;
  const Matrix K = gram(d.X, make_kernel(2.0));
  Rng rng(16);
  std::vector<double> draws;
  for (int b = 0; b < 40; ++b) {
    const Vector y_star = fitted + eps.cwiseProduct(draw_multipliers(80, Multiplier::mammen, rng));
    const Vector e_star = y_star - d.X * oracle::ols(d.X, y_star);
    draws.push_back(oracle::v_statistic(e_star, K));
  }
  EXPECT_NEAR(icm.stat, oracle::v_statistic(eps, K), 1e-10);
  for (double a : o.levels) EXPECT_NEAR(icm.boot_crit.at(a), quantile(draws, 1.0 - a), 1e-9);
}
