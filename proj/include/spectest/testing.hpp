#pragma once

#include "spectest/common.hpp"
#include "spectest/kernel.hpp"
#include "spectest/model.hpp"
#include "spectest/projection.hpp"
#include "spectest/stats.hpp"
#include "spectest/svm.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace spectest {

/// Which learner picks the direction w.
enum class Variant { nu_svm, ocsvm };

std::string_view to_string(Variant v);

struct SplitPlan {
  double train_fraction = 0.1;
  std::uint64_t seed = 0;
};

/// Seeded random partition into (train, test); train gets round(fraction * n)
/// rows. Both sides keep the original row order. Throws DegenerateData when
/// either side has fewer than max(2, d + 1) rows, d = data.score_dim().
std::pair<Dataset, Dataset> split(const Dataset& data, const SplitPlan& plan);

/// `unit` is the degenerate V = 1 multiplier, only meant for tests.
enum class Multiplier { mammen, rademacher, normal, unit };

std::string_view to_string(Multiplier m);
Multiplier parse_multiplier(std::string_view name);

struct BootstrapConfig {
  int B = 500;
  Multiplier multiplier = Multiplier::mammen;
  std::uint64_t seed = 0;
};

/// i.i.d. mean-zero, unit-variance draws. Mammen puts mass
/// b = (1 + sqrt5) / (2 sqrt5) on (1 - sqrt5)/2 and 1 - b on (1 + sqrt5)/2.
Vector draw_multipliers(Index n, Multiplier kind, Rng& rng);

struct TestResult {
  double t_stat = 0.0;
  double chi_sq = 0.0;
  double p_analytic = 1.0;
  std::optional<double> p_bootstrap;
  /// level -> critical value for |sqrt(n) mu_hat|.
  std::map<double, double> boot_crit;
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
  Index n_test = 0;

  Index support_size = 0;
  double eta_l1 = 0.0;
  double rho = 0.0;
  bool singleton_fallback = false;
  double projector_ridge = 0.0;

  Variant variant = Variant::nu_svm;
  Estimator estimator = Estimator::ols;
  double sigma = 0.0;
  double nu = 0.0;
  std::uint64_t seed = 0;
  int B = 0;

  /// Wall-clock seconds spent in the bootstrap loop (never serialized).
  double bootstrap_seconds = 0.0;

  double root_n_mu() const { return std::sqrt(static_cast<double>(n_test)) * mu_hat; }
};

/// Per-observation contributions s_i = eps_p(i) * sum_j eta_j K(i, j).
Vector projected_scores(const Eigen::Ref<const Vector>& eps_p,
                        const Eigen::Ref<const Matrix>& K_cross,
                        const Eigen::Ref<const Vector>& eta);

/// (1/n) sum_i s_i.
double mean_projection(const Eigen::Ref<const Vector>& eps_p, const Eigen::Ref<const Matrix>& K_cross,
                       const Eigen::Ref<const Vector>& eta);

/// Same quantity computed through the projected kernel columns,
/// (1/n) eps' (Pi K) eta, from the unprojected residuals.
double mean_projection_via_kernel(const Eigen::Ref<const Vector>& eps_hat, const Projector& proj,
                                  const Eigen::Ref<const Matrix>& K_cross,
                                  const Eigen::Ref<const Vector>& eta);

/// t-type statistic mu_hat / sigma_hat with sigma_hat^2 the (n - 1) sample
/// variance of the s_i; chi_sq = n t^2 and p_analytic its chi-square(1) tail.
/// Throws DegenerateData when every s_i is equal.
TestResult t_statistic(const Eigen::Ref<const Vector>& eps_p, const Eigen::Ref<const Matrix>& K_cross,
                       const Eigen::Ref<const Vector>& eta);

/// Multiplier bootstrap of sqrt(n) mu_hat: each replication multiplies the
/// raw test residuals by fresh draws, projects, and recomputes.
Vector bootstrap_distribution(const Eigen::Ref<const Vector>& eps_hat_test, const Projector& proj,
                              const Eigen::Ref<const Matrix>& K_cross,
                              const Eigen::Ref<const Vector>& eta, const BootstrapConfig& cfg);

struct BootstrapSummary {
  double p_value = 1.0;
  std::map<double, double> crit;
};

/// Two-sided: p = (1 + #{|d_b| >= |obs|}) / (B + 1); crit at level a is the
/// (1 - a) quantile of |d_b|.
BootstrapSummary summarize_two_sided(double observed, const Eigen::Ref<const Vector>& draws,
                                     const std::vector<double>& levels);

/// Which fitted model supplies the raw test residuals that the bootstrap
/// multiplies: the train fit that also defines the statistic, or the same
/// estimator refit on the test split (lambda held fixed for LASSO).
enum class BootstrapResiduals { test_refit, train_fit };

std::string_view to_string(BootstrapResiduals b);
BootstrapResiduals parse_bootstrap_residuals(std::string_view name);

struct TestOptions {
  Variant variant = Variant::nu_svm;
  Estimator estimator = Estimator::ols;
  /// Fixed Gaussian bandwidth; median heuristic on the train covariates when empty.
  std::optional<double> bandwidth;
  SvmConfig svm;
  /// Analytic inference only when empty.
  std::optional<BootstrapConfig> bootstrap = BootstrapConfig{};
  BootstrapResiduals bootstrap_residuals = BootstrapResiduals::test_refit;
  SplitPlan plan;
  std::vector<double> levels = {0.10, 0.05, 0.01};
  LassoOptions lasso;
};

void validate(const TestOptions& opts);

/// split -> fit on train -> learn direction on train -> projected test
/// residuals -> statistic -> analytic and (optionally) bootstrap inference.
/// Component errors are rethrown with the pipeline stage prefixed.
TestResult run_test(const Dataset& data, const TestOptions& opts);

bool rejects_analytic(const TestResult& r, double level);
/// Throws InvalidArgument when no bootstrap critical value exists for `level`.
bool rejects_bootstrap(const TestResult& r, double level);

}  // namespace spectest
