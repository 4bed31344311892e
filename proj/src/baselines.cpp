#include "spectest/baselines.hpp"

#include "stage.hpp"

#include <chrono>
#include <string>

namespace spectest {

std::string_view to_string(BaselineKind k) {
  switch (k) {
    case BaselineKind::icm: return "icm";
    case BaselineKind::kcm: return "kcm";
    case BaselineKind::gp: return "gp";
  }
  return "unknown";
}

std::string_view to_string(ResidualMode m) { return m == ResidualMode::raw ? "raw" : "projected"; }

double v_statistic(const Eigen::Ref<const Vector>& eps, const Eigen::Ref<const Matrix>& K) {
  if (K.rows() != K.cols() || K.rows() != eps.size()) {
    throw InvalidArgument("v_statistic: K must be square and match the residual length");
  }
  if (eps.size() == 0) throw InvalidArgument("v_statistic: empty residual vector");
  return eps.dot(K * eps) / static_cast<double>(eps.size());
}

Vector v_statistic_columns(const Eigen::Ref<const Matrix>& U, const Eigen::Ref<const Matrix>& K) {
  if (K.rows() != K.cols() || K.rows() != U.rows()) {
    throw InvalidArgument("v_statistic_columns: K must be square and match U");
  }
  const Matrix KU = K * U;
  return U.cwiseProduct(KU).colwise().sum().transpose() / static_cast<double>(U.rows());
}

namespace {

using Clock = std::chrono::steady_clock;

void finish(VStatResult& r, const Vector& draws, const std::vector<double>& levels) {
  long exceed = 0;
  std::vector<double> d(static_cast<std::size_t>(draws.size()));
  for (Index b = 0; b < draws.size(); ++b) {
    d[static_cast<std::size_t>(b)] = draws(b);
    if (draws(b) >= r.stat) ++exceed;
  }
  r.p_bootstrap = static_cast<double>(1 + exceed) / static_cast<double>(draws.size() + 1);
  for (double a : levels) r.boot_crit[a] = quantile(d, 1.0 - a);
  r.B = static_cast<int>(draws.size());
}

void check_boot(const BootstrapConfig& boot, const std::vector<double>& levels) {
  if (boot.B < 1) throw InvalidArgument("bootstrap B must be >= 1");
  for (double a : levels) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("levels must lie in (0, 1)");
  }
}

}  // namespace

VStatResult multiplier_vstat_test(const Eigen::Ref<const Vector>& eps_hat,
                                  const Eigen::Ref<const Matrix>& K, const Projector* proj,
                                  const BootstrapConfig& boot, const std::vector<double>& levels) {
  check_boot(boot, levels);
  const Index n = eps_hat.size();
  if (proj != nullptr && proj->rows() != n) {
    throw InvalidArgument("multiplier_vstat_test: projector size mismatch");
  }
  VStatResult r;
  r.n = n;
  r.seed = boot.seed;
  r.residual_mode = proj != nullptr ? ResidualMode::projected : ResidualMode::raw;
  r.stat = v_statistic(proj != nullptr ? proj->apply(eps_hat) : Vector(eps_hat), K);

  const auto t0 = Clock::now();
  Rng rng(boot.seed);
  Matrix U(n, boot.B);
  for (int b = 0; b < boot.B; ++b) {
    U.col(b) = eps_hat.cwiseProduct(draw_multipliers(n, boot.multiplier, rng));
  }
  if (proj != nullptr) U = proj->apply_columns(U);
  const Vector draws = v_statistic_columns(U, K);
  r.bootstrap_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  finish(r, draws, levels);
  return r;
}

VStatResult icm_test(const Dataset& data, const BaselineOptions& opts) {
  using detail::staged;
  check_boot(opts.bootstrap, opts.levels);
  validate(data);
  const KernelSpec kspec = make_kernel(opts.bandwidth.value_or(2.0));
  const FittedModel model = staged("fit", [&] { return fit(data, opts.estimator, opts.lasso); });
  const ResidualBundle rb = residuals(model, data);
  const Vector fitted = data.y - rb.residuals;
  const Matrix K = gram(data.X, kspec);

  VStatResult r;
  r.kind = BaselineKind::icm;
  r.estimator = opts.estimator;
  r.sigma = kspec.bandwidth;
  r.n = data.n();
  r.seed = opts.bootstrap.seed;
  r.stat = v_statistic(rb.residuals, K);

  const auto t0 = Clock::now();
  Rng rng(opts.bootstrap.seed);
  Matrix U(data.n(), opts.bootstrap.B);
  for (int b = 0; b < opts.bootstrap.B; ++b) {
    U.col(b) = rb.residuals.cwiseProduct(draw_multipliers(data.n(), opts.bootstrap.multiplier, rng));
  }
  if (opts.estimator == Estimator::ols) {
    // Least-squares residuals of fitted + e are the projection of e, so all
    // refits collapse into one batched projection.
    const Projector proj = staged("projector", [&] { return Projector(rb.scores); });
    U = proj.apply_columns(U);
  } else {
    Dataset star = data;
    for (int b = 0; b < opts.bootstrap.B; ++b) {
      star.y = fitted + U.col(b);
      const FittedModel refit = staged("bootstrap refit", [&] { return refit_like(model, star, opts.lasso); });
      U.col(b) = star.y - predict(refit, star.X);
    }
  }
  const Vector draws = v_statistic_columns(U, K);
  r.bootstrap_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  finish(r, draws, opts.levels);
  return r;
}

namespace {

VStatResult multiplier_baseline(BaselineKind kind, const Dataset& data, const BaselineOptions& opts) {
  using detail::staged;
  validate(data);
  const KernelSpec kspec = staged("bandwidth", [&] {
    return opts.bandwidth ? make_kernel(*opts.bandwidth) : median_heuristic(data.X);
  });
  const FittedModel model = staged("fit", [&] { return fit(data, opts.estimator, opts.lasso); });
  const ResidualBundle rb = residuals(model, data);
  const Matrix K = gram(data.X, kspec);
  VStatResult r;
  if (kind == BaselineKind::gp) {
    const Projector proj = staged("projector", [&] { return Projector(rb.scores); });
    r = multiplier_vstat_test(rb.residuals, K, &proj, opts.bootstrap, opts.levels);
  } else {
    r = multiplier_vstat_test(rb.residuals, K, nullptr, opts.bootstrap, opts.levels);
  }
  r.kind = kind;
  r.estimator = opts.estimator;
  r.sigma = kspec.bandwidth;
  return r;
}

}  // namespace

VStatResult kcm_test(const Dataset& data, const BaselineOptions& opts) {
  return multiplier_baseline(BaselineKind::kcm, data, opts);
}

VStatResult gp_test(const Dataset& data, const BaselineOptions& opts) {
  return multiplier_baseline(BaselineKind::gp, data, opts);
}

VStatResult run_baseline(BaselineKind kind, const Dataset& data, const BaselineOptions& opts) {
  switch (kind) {
    case BaselineKind::icm: return icm_test(data, opts);
    case BaselineKind::kcm: return kcm_test(data, opts);
    case BaselineKind::gp: return gp_test(data, opts);
  }
  throw InvalidArgument("run_baseline: unknown kind");
}

bool rejects(const VStatResult& r, double level) {
  const auto it = r.boot_crit.find(level);
  if (it == r.boot_crit.end()) {
    throw InvalidArgument("no bootstrap critical value for level " + std::to_string(level));
  }
  return r.stat > it->second;
}

}  // namespace spectest
