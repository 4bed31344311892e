#include "spectest/testing.hpp"

#include "stage.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace spectest {

std::string_view to_string(Variant v) { return v == Variant::nu_svm ? "nusvm" : "ocsvm"; }

std::string_view to_string(Multiplier m) {
  switch (m) {
    case Multiplier::mammen: return "mammen";
    case Multiplier::rademacher: return "rademacher";
    case Multiplier::normal: return "normal";
    case Multiplier::unit: return "unit";
  }
  return "unknown";
}

Multiplier parse_multiplier(std::string_view name) {
  if (name == "mammen") return Multiplier::mammen;
  if (name == "rademacher") return Multiplier::rademacher;
  if (name == "normal") return Multiplier::normal;
  throw InvalidArgument("unknown multiplier '" + std::string(name) +
                        "' (expected mammen|rademacher|normal)");
}

std::pair<Dataset, Dataset> split(const Dataset& data, const SplitPlan& plan) {
  validate(data);
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0)) {
    throw InvalidArgument("split: train fraction must lie in (0, 1)");
  }
  const Index n = data.n();
  const auto n_train = static_cast<Index>(std::llround(plan.train_fraction * static_cast<double>(n)));
  const Index n_test = n - n_train;
  const Index need = std::max<Index>(2, data.score_dim() + 1);
  if (n_train < need || n_test < need) {
    throw DegenerateData("split: sizes " + std::to_string(n_train) + "/" + std::to_string(n_test) +
                         " leave a side below the minimum of " + std::to_string(need) + " rows");
  }
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Rng rng(plan.seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Index> train(idx.begin(), idx.begin() + n_train);
  std::vector<Index> test(idx.begin() + n_train, idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {subset(data, train), subset(data, test)};
}

Vector draw_multipliers(Index n, Multiplier kind, Rng& rng) {
  Vector v(n);
  switch (kind) {
    case Multiplier::mammen: {
      const double s5 = std::sqrt(5.0);
      const double lo = 0.5 * (1.0 - s5), hi = 0.5 * (1.0 + s5);
      const double b = (1.0 + s5) / (2.0 * s5);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (Index i = 0; i < n; ++i) v(i) = u(rng) < b ? lo : hi;
      break;
    }
    case Multiplier::rademacher: {
      for (Index i = 0; i < n;) {
        std::uint64_t bits = rng();
        for (int k = 0; k < 64 && i < n; ++k, ++i, bits >>= 1) v(i) = (bits & 1U) ? 1.0 : -1.0;
      }
      break;
    }
    case Multiplier::normal: {
      std::normal_distribution<double> z(0.0, 1.0);
      for (Index i = 0; i < n; ++i) v(i) = z(rng);
      break;
    }
    case Multiplier::unit:
      v.setOnes();
      break;
  }
  return v;
}

namespace {

void check_shapes(Index n, const Eigen::Ref<const Matrix>& K_cross, const Eigen::Ref<const Vector>& eta,
                  const char* who) {
  if (K_cross.rows() != n || K_cross.cols() != eta.size()) {
    throw InvalidArgument(std::string(who) + ": expected K_cross " + std::to_string(n) + "x" +
                          std::to_string(eta.size()) + ", got " + std::to_string(K_cross.rows()) +
                          "x" + std::to_string(K_cross.cols()));
  }
}

}  // namespace

Vector projected_scores(const Eigen::Ref<const Vector>& eps_p, const Eigen::Ref<const Matrix>& K_cross,
                        const Eigen::Ref<const Vector>& eta) {
  check_shapes(eps_p.size(), K_cross, eta, "projected_scores");
  return eps_p.cwiseProduct(K_cross * eta);
}

double mean_projection(const Eigen::Ref<const Vector>& eps_p, const Eigen::Ref<const Matrix>& K_cross,
                       const Eigen::Ref<const Vector>& eta) {
  if (eps_p.size() == 0) throw InvalidArgument("mean_projection: empty residual vector");
  return projected_scores(eps_p, K_cross, eta).mean();
}

double mean_projection_via_kernel(const Eigen::Ref<const Vector>& eps_hat, const Projector& proj,
                                  const Eigen::Ref<const Matrix>& K_cross,
                                  const Eigen::Ref<const Vector>& eta) {
  check_shapes(eps_hat.size(), K_cross, eta, "mean_projection_via_kernel");
  const Matrix Kp = project_kernel_columns(proj, K_cross);
  return eps_hat.dot(Kp * eta) / static_cast<double>(eps_hat.size());
}

TestResult t_statistic(const Eigen::Ref<const Vector>& eps_p, const Eigen::Ref<const Matrix>& K_cross,
                       const Eigen::Ref<const Vector>& eta) {
  const Index n = eps_p.size();
  if (n < 2) throw InvalidArgument("t_statistic: need at least two test observations");
  const Vector s = projected_scores(eps_p, K_cross, eta);
  const double mu = s.mean();
  const double var = (s.array() - mu).square().sum() / static_cast<double>(n - 1);
  if (!(var > 1e-24 * s.squaredNorm() / static_cast<double>(n))) {
    throw DegenerateData("t_statistic: projected scores have zero variance");
  }
  TestResult r;
  r.n_test = n;
  r.mu_hat = mu;
  r.sigma_hat = std::sqrt(var);
  r.t_stat = mu / r.sigma_hat;
  r.chi_sq = static_cast<double>(n) * r.t_stat * r.t_stat;
  r.p_analytic = chi2_1_sf(r.chi_sq);
  return r;
}

Vector bootstrap_distribution(const Eigen::Ref<const Vector>& eps_hat_test, const Projector& proj,
                              const Eigen::Ref<const Matrix>& K_cross,
                              const Eigen::Ref<const Vector>& eta, const BootstrapConfig& cfg) {
  const Index n = eps_hat_test.size();
  check_shapes(n, K_cross, eta, "bootstrap_distribution");
  if (proj.rows() != n) throw InvalidArgument("bootstrap_distribution: projector size mismatch");
  if (cfg.B < 1) throw InvalidArgument("bootstrap_distribution: B must be >= 1");

  const Vector w = K_cross * eta;
  const double root_n = std::sqrt(static_cast<double>(n));
  Rng rng(cfg.seed);
  Vector out(cfg.B);
  for (int b = 0; b < cfg.B; ++b) {
    const Vector v = draw_multipliers(n, cfg.multiplier, rng);
    const Vector eps_p = proj.apply(eps_hat_test.cwiseProduct(v));
    out(b) = root_n * eps_p.dot(w) / static_cast<double>(n);
  }
  return out;
}

BootstrapSummary summarize_two_sided(double observed, const Eigen::Ref<const Vector>& draws,
                                     const std::vector<double>& levels) {
  if (draws.size() == 0) throw InvalidArgument("summarize_two_sided: no bootstrap draws");
  std::vector<double> mags(static_cast<std::size_t>(draws.size()));
  long exceed = 0;
  const double obs = std::abs(observed);
  for (Index b = 0; b < draws.size(); ++b) {
    mags[static_cast<std::size_t>(b)] = std::abs(draws(b));
    if (std::abs(draws(b)) >= obs) ++exceed;
  }
  BootstrapSummary s;
  s.p_value = static_cast<double>(1 + exceed) / static_cast<double>(draws.size() + 1);
  for (double a : levels) s.crit[a] = quantile(mags, 1.0 - a);
  return s;
}

void validate(const TestOptions& opts) {
  validate(opts.svm);
  if (opts.bandwidth) make_kernel(*opts.bandwidth);
  if (opts.bootstrap && opts.bootstrap->B < 1) throw InvalidArgument("bootstrap B must be >= 1");
  if (!(opts.plan.train_fraction > 0.0 && opts.plan.train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  for (double a : opts.levels) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("levels must lie in (0, 1)");
  }
}

std::string_view to_string(BootstrapResiduals b) {
  return b == BootstrapResiduals::test_refit ? "test-refit" : "train-fit";
}

BootstrapResiduals parse_bootstrap_residuals(std::string_view name) {
  if (name == "test-refit") return BootstrapResiduals::test_refit;
  if (name == "train-fit") return BootstrapResiduals::train_fit;
  throw InvalidArgument("unknown bootstrap residual source '" + std::string(name) +
                        "' (expected test-refit|train-fit)");
}

TestResult run_test(const Dataset& data, const TestOptions& opts) {
  using detail::staged;
  validate(opts);
  validate(data);

  const auto [train, test] = staged("split", [&] { return split(data, opts.plan); });
  const FittedModel model = staged("fit", [&] { return fit(train, opts.estimator, opts.lasso); });
  const KernelSpec kspec = staged("bandwidth", [&] {
    return opts.bandwidth ? make_kernel(*opts.bandwidth) : median_heuristic(train.X);
  });

  const Direction dir = staged("direction", [&] {
    const ResidualBundle fit_train = residuals(model, train);
    const Projector train_proj(fit_train.scores);
    if (opts.variant == Variant::nu_svm) {
      const Vector y_p = train_proj.apply(train.y);
      const Vector m_p = train_proj.apply(train.y - fit_train.residuals);
      const ShiftedTrainingSet ts = make_two_class_set(train.X, y_p, m_p, opts.svm.shift_pad);
      return train_nu_svc(ts, kspec, opts.svm);
    }
    const Vector eps_p = train_proj.apply(fit_train.residuals);
    const ShiftedTrainingSet ts = make_one_class_set(train.X, eps_p, opts.svm.shift_pad);
    return train_ocsvm(ts, kspec, opts.svm);
  });

  const ResidualBundle fit_test = staged("test residuals", [&] { return residuals(model, test); });
  const Projector test_proj = staged("test projector", [&] { return Projector(fit_test.scores); });
  const Vector eps_p = test_proj.apply(fit_test.residuals);
  if (!(eps_p.norm() > 1e-12 * std::max(1.0, test.y.norm()))) {
    throw DegenerateData("statistic: projected test residuals vanish (zero residual variance)");
  }
  const Matrix K_cross = gram(test.X, dir.support_points, kspec);

  TestResult r = staged("statistic", [&] { return t_statistic(eps_p, K_cross, dir.weights); });
  r.support_size = dir.size();
  r.eta_l1 = dir.weights.lpNorm<1>();
  r.rho = dir.rho;
  r.singleton_fallback = dir.singleton_fallback;
  r.projector_ridge = test_proj.ridge();
  r.variant = opts.variant;
  r.estimator = opts.estimator;
  r.sigma = kspec.bandwidth;
  r.nu = opts.svm.nu;
  r.seed = opts.plan.seed;

  if (opts.bootstrap) {
    const Vector eps_hat = staged("bootstrap residuals", [&] {
      if (opts.bootstrap_residuals == BootstrapResiduals::train_fit) return fit_test.residuals;
      return residuals(refit_like(model, test, opts.lasso), test).residuals;
    });
    const auto t0 = std::chrono::steady_clock::now();
    const Vector draws = staged("bootstrap", [&] {
      return bootstrap_distribution(eps_hat, test_proj, K_cross, dir.weights,
                                    *opts.bootstrap);
    });
    r.bootstrap_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const BootstrapSummary s = summarize_two_sided(r.root_n_mu(), draws, opts.levels);
    r.p_bootstrap = s.p_value;
    r.boot_crit = s.crit;
    r.B = opts.bootstrap->B;
  }
  return r;
}

bool rejects_analytic(const TestResult& r, double level) { return r.p_analytic < level; }

bool rejects_bootstrap(const TestResult& r, double level) {
  const auto it = r.boot_crit.find(level);
  if (it == r.boot_crit.end()) {
    throw InvalidArgument("no bootstrap critical value for level " + std::to_string(level));
  }
  return std::abs(r.root_n_mu()) > it->second;
}

}  // namespace spectest
