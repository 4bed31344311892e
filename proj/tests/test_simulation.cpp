#include "spectest/simulation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace spectest;

TEST(Dgp, NullCoefficients) {
  const Vector t10 = null_coefficients(10);
  EXPECT_EQ(t10(0), 1.0);
  EXPECT_EQ(t10.sum(), 1.0);
  EXPECT_EQ(null_coefficients(20).head(2).sum(), 2.0);
  EXPECT_EQ(null_coefficients(20).sum(), 2.0);
}

TEST(Dgp, ZeroDeviationCollapsesToNull) {
  for (DgpId id : {DgpId::d2, DgpId::d3, DgpId::d4, DgpId::d5}) {
    DgpSpec alt{id, 10, 50, 0.0, 7};
    DgpSpec null{DgpId::d1, 10, 50, 0.0, 7};
    const Dataset a = gen_dgp(alt), b = gen_dgp(null);
    EXPECT_EQ(a.X, b.X);
    EXPECT_EQ(a.y, b.y);
  }
}

TEST(Dgp, QuadraticMomentCheck) {
  DgpSpec spec{DgpId::d4, 10, 100000, 0.25, 3};
  const Dataset d = gen_dgp(spec);
  const Vector dev = d.y - d.X.col(0);
  const double mean = dev.mean();
  const double se = std::sqrt((dev.array() - mean).square().sum() / (d.n() - 1.0) / d.n());
  EXPECT_NEAR(mean, 0.125, 3 * se);
}

TEST(Dgp, StarredDesigns) {
  for (DgpId id : {DgpId::d1s, DgpId::d2s, DgpId::d3s}) {
    DgpSpec spec{id, 10, 4000, 0.25, 5};
    const Dataset d = gen_dgp(spec);
    EXPECT_TRUE(d.intercept);
    EXPECT_GE(d.X.leftCols(5).minCoeff(), 0.0);
    EXPECT_LE(d.X.leftCols(5).maxCoeff(), 1.0);
    EXPECT_LT(d.X.rightCols(5).minCoeff(), 0.0);
  }
  // Last column of 2*: variance 1 + 0.1 * 5.
  DgpSpec spec{DgpId::d2s, 10, 20000, 0.25, 6};
  const Dataset d = gen_dgp(spec);
  const Vector c = d.X.col(9);
  const double var = (c.array() - c.mean()).square().sum() / (c.size() - 1.0);
  EXPECT_NEAR(var, 1.5, 0.05);
}

TEST(Dgp, Validation) {
  EXPECT_THROW(parse_dgp("6"), InvalidArgument);
  EXPECT_EQ(parse_dgp("2*"), DgpId::d2s);
  EXPECT_EQ(to_string(DgpId::d3s), "3*");
  DgpSpec bad{DgpId::d1, 5, 100};
  EXPECT_THROW(validate(bad), InvalidArgument);
  DgpSpec neg{DgpId::d2, 10, 100, -1.0};
  EXPECT_THROW(validate(neg), InvalidArgument);
}

TEST(MonteCarlo, SingleReplicationRatesAreBinary) {
  McConfig cfg;
  cfg.R = 1;
  cfg.B = 50;
  cfg.tests = {TestKind::nusvm, TestKind::kcm};
  const McReport rep = run_mc(cfg, {DgpSpec{DgpId::d2, 10, 200}});
  ASSERT_EQ(rep.cells.size(), 3u * 3u);
  for (const McCell& c : rep.cells) {
    EXPECT_TRUE(c.rate == 0.0 || c.rate == 1.0);
    EXPECT_EQ(c.reps, 1);
  }
}

TEST(MonteCarlo, WorkerCountDoesNotChangeResults) {
  McConfig cfg;
  cfg.R = 12;
  cfg.B = 50;
  cfg.tests = {TestKind::ocsvm, TestKind::gp};
  cfg.base_seed = 77;
  const std::vector<DgpSpec> dgps = {DgpSpec{DgpId::d1, 10, 150}, DgpSpec{DgpId::d3, 10, 150}};
  cfg.workers = 1;
  const McReport a = run_mc(cfg, dgps);
  cfg.workers = 8;
  const McReport b = run_mc(cfg, dgps);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    EXPECT_EQ(a.cells[i].rejections, b.cells[i].rejections);
    EXPECT_EQ(a.cells[i].rate, b.cells[i].rate);
    EXPECT_EQ(a.cells[i].test, b.cells[i].test);
  }
}

TEST(MonteCarlo, FailingCellsAreFlagged) {
  McConfig cfg;
  cfg.R = 3;
  cfg.B = 10;
  cfg.tests = {TestKind::nusvm};
  const McReport rep = run_mc(cfg, {DgpSpec{DgpId::d1, 10, 30}});
  for (const McCell& c : rep.cells) {
    EXPECT_EQ(c.failures, 3);
    EXPECT_TRUE(c.flagged);
  }
}

TEST(MonteCarlo, AnalyticOnlyOmitsBootstrapRows) {
  McConfig cfg;
  cfg.R = 2;
  cfg.bootstrap = false;
  cfg.tests = {TestKind::ocsvm};
  const McReport rep = run_mc(cfg, {DgpSpec{DgpId::d1, 10, 200}});
  for (const McCell& c : rep.cells) EXPECT_EQ(c.mode, "analytic");
}

TEST(MonteCarlo, ConfigValidation) {
  McConfig cfg;
  cfg.R = 0;
  EXPECT_THROW(validate(cfg), InvalidArgument);
  cfg.R = 1;
  cfg.levels = {1.5};
  EXPECT_THROW(validate(cfg), InvalidArgument);
}

TEST(MonteCarlo, ReplicationSeedDependsOnDesign) {
  const DgpSpec a{DgpId::d1, 10, 400}, b{DgpId::d2, 10, 400};
  EXPECT_NE(replication_seed(1, a, 0), replication_seed(1, b, 0));
  EXPECT_NE(replication_seed(1, a, 0), replication_seed(1, a, 1));
  EXPECT_EQ(replication_seed(1, a, 5), replication_seed(1, a, 5));
}

TEST(TimeProfile, LayoutAndExponents) {
  TimeProfileOptions o;
  o.tests = {TestKind::ocsvm, TestKind::kcm};
  o.n_grid = {150, 300};
  o.reps = 1;
  o.B = 20;
  const TimeProfile p = time_profile(o);
  ASSERT_EQ(p.rows.size(), 4u);
  EXPECT_EQ(p.rows[0].test, "ocsvm");
  EXPECT_EQ(p.rows[1].n, 300);
  EXPECT_EQ(p.exponent.size(), 2u);
  o.n_grid = {150};
  EXPECT_THROW(time_profile(o), InvalidArgument);
}
