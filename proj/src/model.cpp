#include "spectest/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spectest {

std::string_view to_string(Estimator e) { return e == Estimator::ols ? "ols" : "lasso"; }

Estimator parse_estimator(std::string_view name) {
  if (name == "ols") return Estimator::ols;
  if (name == "lasso") return Estimator::lasso;
  throw InvalidArgument("unknown estimator '" + std::string(name) + "' (expected ols|lasso)");
}

Matrix design_matrix(const Eigen::Ref<const Matrix>& X, bool intercept) {
  if (!intercept) return X;
  Matrix D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  return D;
}

Vector predict(const FittedModel& model, const Eigen::Ref<const Matrix>& X) {
  const Index p = X.cols() + (model.intercept ? 1 : 0);
  if (model.theta.size() != p) {
    throw InvalidArgument("predict: model has " + std::to_string(model.theta.size()) +
                          " coefficients, data needs " + std::to_string(p));
  }
  if (!model.intercept) return X * model.theta;
  Vector out = X * model.theta.tail(X.cols());
  out.array() += model.theta(0);
  return out;
}

FittedModel fit_ols(const Dataset& data) {
  validate(data);
  const Matrix D = design_matrix(data.X, data.intercept);
  if (D.rows() < D.cols()) {
    throw DegenerateData("fit_ols: " + std::to_string(D.rows()) + " observations for " +
                         std::to_string(D.cols()) + " coefficients");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(D);
  if (qr.rank() < D.cols()) {
    throw DegenerateData("fit_ols: rank-deficient design (rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(D.cols()) + ")");
  }
  FittedModel m;
  m.theta = qr.solve(data.y);
  m.estimator = Estimator::ols;
  m.intercept = data.intercept;
  return m;
}

namespace {

struct Centered {
  Matrix X;
  Vector y;
  Eigen::RowVectorXd x_mean;
  double y_mean = 0.0;
};

Centered center(const Dataset& data) {
  Centered c{data.X, data.y, Eigen::RowVectorXd::Zero(data.X.cols()), 0.0};
  if (data.intercept) {
    c.x_mean = data.X.colwise().mean();
    c.y_mean = data.y.mean();
    c.X.rowwise() -= c.x_mean;
    c.y.array() -= c.y_mean;
  }
  return c;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lasso: lambda must be finite and nonnegative, got " +
                          std::to_string(lambda));
  }
}

}  // namespace

std::vector<double> default_lambda_grid(const Dataset& data, int points, double ratio) {
  validate(data);
  if (points < 1) throw InvalidArgument("default_lambda_grid: points must be >= 1");
  const Centered c = center(data);
  const double n = static_cast<double>(data.n());
  const double lmax = (c.X.transpose() * c.y).cwiseAbs().maxCoeff() / n;
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1 || !(lmax > 0.0)) {
    std::fill(grid.begin(), grid.end(), lmax);
    return grid;
  }
  const double step = std::log(ratio) / (points - 1);
  for (int k = 0; k < points; ++k) grid[static_cast<std::size_t>(k)] = lmax * std::exp(step * k);
  return grid;
}

FittedModel lasso_at(const Dataset& data, double lambda, const LassoOptions& opts,
                     const Vector* warm) {
  validate(data);
  check_lambda(lambda);
  const Centered c = center(data);
  const Index q = data.q();
  const double n = static_cast<double>(data.n());

  const Vector a = c.X.colwise().squaredNorm().transpose() / n;
  Vector theta = Vector::Zero(q);
  if (warm != nullptr && warm->size() == q) theta = *warm;
  Vector r = c.y - c.X * theta;
  const double scale = std::max(1.0, std::sqrt(c.y.squaredNorm() / n));

  long sweep = 0;
  double max_delta = 0.0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    max_delta = 0.0;
    for (Index j = 0; j < q; ++j) {
      if (a(j) <= 0.0) {
        theta(j) = 0.0;
        continue;
      }
      const double rho = c.X.col(j).dot(r) / n + a(j) * theta(j);
      const double next = soft_threshold(rho, lambda) / a(j);
      const double d = next - theta(j);
      if (d != 0.0) {
        r.noalias() -= d * c.X.col(j);
        theta(j) = next;
        max_delta = std::max(max_delta, std::abs(d) * std::sqrt(a(j)));
      }
    }
    if (max_delta <= opts.tol * scale) break;
  }
  if (sweep == opts.max_sweeps) {
    throw NonConvergence("lasso: coordinate descent did not converge in " +
                             std::to_string(opts.max_sweeps) + " sweeps",
                         max_delta);
  }

  FittedModel m;
  m.estimator = Estimator::lasso;
  m.lambda = lambda;
  m.intercept = data.intercept;
  if (data.intercept) {
    m.theta.resize(q + 1);
    m.theta(0) = c.y_mean - c.x_mean.dot(theta);
    m.theta.tail(q) = theta;
  } else {
    m.theta = theta;
  }
  return m;
}

FittedModel fit_lasso(const Dataset& data, const LassoOptions& opts) {
  validate(data);
  if (opts.lambda_grid.empty()) throw InvalidArgument("fit_lasso: empty lambda grid");
  for (double l : opts.lambda_grid) check_lambda(l);
  if (opts.folds < 2) throw InvalidArgument("fit_lasso: folds must be >= 2");
  const Index n = data.n();
  if (opts.folds > n) throw InvalidArgument("fit_lasso: more folds than observations");

  // Descending order so each fold walks the path with warm starts.
  std::vector<std::size_t> order(opts.lambda_grid.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return opts.lambda_grid[a] > opts.lambda_grid[b];
  });

  std::vector<double> cv_error(opts.lambda_grid.size(), 0.0);
  for (int fold = 0; fold < opts.folds; ++fold) {
    std::vector<Index> train_rows, hold_rows;
    for (Index i = 0; i < n; ++i) (i % opts.folds == fold ? hold_rows : train_rows).push_back(i);
    const Dataset train = subset(data, train_rows);
    const Dataset hold = subset(data, hold_rows);
    Vector warm = Vector::Zero(data.q());
    for (std::size_t k : order) {
      const FittedModel m = lasso_at(train, opts.lambda_grid[k], opts, &warm);
      warm = data.intercept ? Vector(m.theta.tail(data.q())) : m.theta;
      cv_error[k] += (hold.y - predict(m, hold.X)).squaredNorm();
    }
  }

  std::size_t best = order.front();
  for (std::size_t k : order) {
    if (cv_error[k] < cv_error[best]) best = k;
  }
  return lasso_at(data, opts.lambda_grid[best], opts);
}

FittedModel fit(const Dataset& data, Estimator estimator, const LassoOptions& opts) {
  if (estimator == Estimator::ols) return fit_ols(data);
  if (!opts.lambda_grid.empty()) return fit_lasso(data, opts);
  LassoOptions with_grid = opts;
  with_grid.lambda_grid = default_lambda_grid(data);
  return fit_lasso(data, with_grid);
}

FittedModel refit_like(const FittedModel& reference, const Dataset& data,
                       const LassoOptions& opts) {
  if (reference.estimator == Estimator::ols) return fit_ols(data);
  return lasso_at(data, reference.lambda, opts);
}

ResidualBundle residuals(const FittedModel& model, const Dataset& data) {
  validate(data);
  if (model.intercept != data.intercept) {
    throw InvalidArgument("residuals: intercept flag differs between model and data");
  }
  ResidualBundle out;
  out.residuals = data.y - predict(model, data.X);
  out.scores = design_matrix(data.X, data.intercept);
  return out;
}

}  // namespace spectest
