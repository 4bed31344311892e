#pragma once

#include "spectest/common.hpp"
#include "spectest/kernel.hpp"
#include "spectest/model.hpp"
#include "spectest/projection.hpp"
#include "spectest/testing.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace spectest {

// Full-sample V-statistic tests used as references: (1/n) e' K e with
// bootstrap critical values taken from the upper tail.

enum class BaselineKind { icm, kcm, gp };
enum class ResidualMode { raw, projected };

std::string_view to_string(BaselineKind k);
std::string_view to_string(ResidualMode m);

struct VStatResult {
  double stat = 0.0;
  double p_bootstrap = 1.0;
  std::map<double, double> boot_crit;
  int B = 0;
  Index n = 0;
  double sigma = 0.0;
  ResidualMode residual_mode = ResidualMode::raw;
  BaselineKind kind = BaselineKind::kcm;
  Estimator estimator = Estimator::ols;
  std::uint64_t seed = 0;
  double bootstrap_seconds = 0.0;
};

/// (1/n) eps' K eps.
double v_statistic(const Eigen::Ref<const Vector>& eps, const Eigen::Ref<const Matrix>& K);

/// (1/n) u_b' K u_b for every column u_b of U.
Vector v_statistic_columns(const Eigen::Ref<const Matrix>& U, const Eigen::Ref<const Matrix>& K);

/// Multiplier bootstrap without refitting. With `proj` the observed statistic
/// uses Pi eps and every draw is Pi (eps . V) (GP); without it both stay raw (KCM).
VStatResult multiplier_vstat_test(const Eigen::Ref<const Vector>& eps_hat,
                                  const Eigen::Ref<const Matrix>& K, const Projector* proj,
                                  const BootstrapConfig& boot, const std::vector<double>& levels);

struct BaselineOptions {
  Estimator estimator = Estimator::ols;
  /// ICM defaults to 2; KCM and GP default to the median heuristic.
  std::optional<double> bandwidth;
  BootstrapConfig bootstrap;
  std::vector<double> levels = {0.10, 0.05, 0.01};
  LassoOptions lasso;
};

/// Raw residuals, fixed bandwidth (2 unless overridden), residual wild
/// bootstrap with the model refit on every y* = fitted + eps . V.
VStatResult icm_test(const Dataset& data, const BaselineOptions& opts);

/// Raw residuals, median-heuristic bandwidth, multiplier bootstrap.
VStatResult kcm_test(const Dataset& data, const BaselineOptions& opts);

/// Projected residuals Pi eps from full-sample scores, multiplier bootstrap
/// that projects every multiplied residual vector.
VStatResult gp_test(const Dataset& data, const BaselineOptions& opts);

VStatResult run_baseline(BaselineKind kind, const Dataset& data, const BaselineOptions& opts);

/// Throws InvalidArgument when no critical value exists for `level`.
bool rejects(const VStatResult& r, double level);

}  // namespace spectest
