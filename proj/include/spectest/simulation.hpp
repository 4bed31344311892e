#pragma once

#include "spectest/baselines.hpp"
#include "spectest/common.hpp"
#include "spectest/model.hpp"
#include "spectest/stats.hpp"
#include "spectest/testing.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spectest {

/// d1..d5: X ~ N(0, I_q), u = theta0'X with theta0 = (1,..,1,0,..,0) holding
/// p = floor(q / 10) ones, Y = u + deviation(u) + eps.
/// d1s..d3s: intercept designs, half U(0,1) covariates and half normal.
enum class DgpId { d1, d2, d3, d4, d5, d1s, d2s, d3s };

std::string to_string(DgpId id);
/// Accepts "1".."5", "1*".."3*" (also "1s".."3s").
DgpId parse_dgp(std::string_view name);
bool has_intercept(DgpId id);

struct DgpSpec {
  DgpId id = DgpId::d1;
  Index q = 10;
  Index n = 400;
  /// Deviation scale of d2..d5.
  double c = 0.25;
  std::uint64_t seed = 0;
  /// Intercept and common slope of the starred designs.
  double beta0 = 1.0;
  double beta = 1.0;
};

void validate(const DgpSpec& spec);

/// theta0 for d1..d5.
Vector null_coefficients(Index q);

Dataset gen_dgp(const DgpSpec& spec, Rng& rng);
/// Seeds the generator from spec.seed.
Dataset gen_dgp(const DgpSpec& spec);

enum class TestKind { nusvm, ocsvm, gp, kcm, icm };

std::string_view to_string(TestKind k);
TestKind parse_test_kind(std::string_view name);
bool is_svm(TestKind k);

struct McConfig {
  int R = 1000;
  std::vector<double> levels = {0.10, 0.05, 0.01};
  int B = 500;
  std::vector<TestKind> tests = {TestKind::nusvm, TestKind::ocsvm, TestKind::gp, TestKind::kcm,
                                 TestKind::icm};
  Estimator estimator = Estimator::ols;
  int workers = 1;
  std::uint64_t base_seed = 0;
  double nu = 0.5;
  /// Bandwidth for nusvm/ocsvm/gp/kcm; median heuristic when empty.
  std::optional<double> bandwidth;
  double icm_bandwidth = 2.0;
  double train_fraction = 0.1;
  Multiplier multiplier = Multiplier::mammen;
  /// SVM tests: run the bootstrap (baselines always do).
  bool bootstrap = true;
  BootstrapResiduals bootstrap_residuals = BootstrapResiduals::test_refit;
  LassoOptions lasso;
};

void validate(const McConfig& cfg);

/// One (test, dgp, level, mode) rejection rate.
struct McCell {
  std::string test;
  std::string dgp;
  Index q = 0;
  Index n = 0;
  Estimator estimator = Estimator::ols;
  double level = 0.0;
  std::string mode;  // "bootstrap" | "analytic"
  long rejections = 0;
  long reps = 0;
  long failures = 0;
  /// rejections / successful replications.
  double rate = 0.0;
  /// sqrt(rate (1 - rate) / successful replications).
  double mc_se = 0.0;
  /// Summed wall-clock time of the cell's replications.
  double seconds = 0.0;
  /// More than 1% of replications failed.
  bool flagged = false;
};

struct McReport {
  McConfig config;
  std::vector<DgpSpec> dgps;
  std::vector<McCell> cells;

  /// First cell matching the key; throws InvalidArgument when absent.
  const McCell& find(TestKind test, DgpId dgp, Index q, Index n, double level,
                     std::string_view mode) const;
};

/// Seed of replication `rep` of the dataset described by `spec`; mixes the
/// base seed, the design and the replication index so that results do not
/// depend on worker count or scheduling.
std::uint64_t replication_seed(std::uint64_t base, const DgpSpec& spec, long rep);

McReport run_mc(const McConfig& cfg, const std::vector<DgpSpec>& dgps);

struct TimingRow {
  std::string test;
  Index n = 0;
  /// Median over repetitions of the bootstrap stage, seconds.
  double bootstrap_seconds = 0.0;
  /// Median over repetitions of the whole test call, seconds.
  double total_seconds = 0.0;
  int reps = 0;
};

struct TimeProfile {
  std::vector<TimingRow> rows;
  /// Log-log slope of bootstrap seconds on n, per test.
  std::map<std::string, double> exponent;
};

struct TimeProfileOptions {
  std::vector<TestKind> tests = {TestKind::nusvm, TestKind::ocsvm, TestKind::gp, TestKind::kcm,
                                 TestKind::icm};
  std::vector<Index> n_grid = {200, 400, 800};
  int reps = 5;
  Index q = 10;
  DgpId dgp = DgpId::d2;
  int B = 500;
  std::uint64_t seed = 0;
};

/// Single-threaded wall-clock profile across the n grid.
TimeProfile time_profile(const TimeProfileOptions& opts);

}  // namespace spectest
