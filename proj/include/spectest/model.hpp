#pragma once

#include "spectest/common.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace spectest {

enum class Estimator { ols, lasso };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

/// Linear model y = theta' x (+ intercept). With an intercept, theta(0) is the
/// constant term and theta.tail(q) the slopes.
struct FittedModel {
  Vector theta;
  Estimator estimator = Estimator::ols;
  double lambda = 0.0;
  bool intercept = false;
};

/// Residuals plus the score matrix (row i = gradient of the residual in theta,
/// stored with positive sign; for the linear model that is the design row).
struct ResidualBundle {
  Vector residuals;
  Matrix scores;
};

/// [1, X] when `intercept`, else X.
Matrix design_matrix(const Eigen::Ref<const Matrix>& X, bool intercept);

Vector predict(const FittedModel& model, const Eigen::Ref<const Matrix>& X);

/// Least squares via column-pivoted QR. Throws DegenerateData on a
/// rank-deficient design.
FittedModel fit_ols(const Dataset& data);

struct LassoOptions {
  /// Candidate penalties; fit_lasso rejects an empty grid.
  std::vector<double> lambda_grid;
  int folds = 5;
  double tol = 1e-12;
  long max_sweeps = 100000;
};

/// Log-spaced grid from lambda_max = max_j |X_j'y|/n (centered when the data
/// carry an intercept) down to ratio * lambda_max.
std::vector<double> default_lambda_grid(const Dataset& data, int points = 50,
                                        double ratio = 1e-3);

/// Coordinate descent for (1/2n)||y - X theta||^2 + lambda ||theta||_1.
/// The intercept, when present, is unpenalized. `warm` seeds the slopes.
FittedModel lasso_at(const Dataset& data, double lambda, const LassoOptions& opts = {},
                     const Vector* warm = nullptr);

/// K-fold cross-validated lasso over opts.lambda_grid, refit on all of `data`
/// at the penalty with the smallest mean held-out squared error.
FittedModel fit_lasso(const Dataset& data, const LassoOptions& opts);

/// Dispatch on estimator; lasso uses the default 50-point grid when
/// opts.lambda_grid is empty.
FittedModel fit(const Dataset& data, Estimator estimator, const LassoOptions& opts = {});

/// Refit with the penalty of `reference` held fixed (no new cross-validation).
FittedModel refit_like(const FittedModel& reference, const Dataset& data,
                       const LassoOptions& opts = {});

ResidualBundle residuals(const FittedModel& model, const Dataset& data);

}  // namespace spectest
