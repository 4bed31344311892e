#include "spectest/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

namespace spectest {

std::string to_string(DgpId id) {
  switch (id) {
    case DgpId::d1: return "1";
    case DgpId::d2: return "2";
    case DgpId::d3: return "3";
    case DgpId::d4: return "4";
    case DgpId::d5: return "5";
    case DgpId::d1s: return "1*";
    case DgpId::d2s: return "2*";
    case DgpId::d3s: return "3*";
  }
  return "?";
}

DgpId parse_dgp(std::string_view name) {
  if (name == "1") return DgpId::d1;
  if (name == "2") return DgpId::d2;
  if (name == "3") return DgpId::d3;
  if (name == "4") return DgpId::d4;
  if (name == "5") return DgpId::d5;
  if (name == "1*" || name == "1s") return DgpId::d1s;
  if (name == "2*" || name == "2s") return DgpId::d2s;
  if (name == "3*" || name == "3s") return DgpId::d3s;
  throw InvalidArgument("unknown DGP id '" + std::string(name) + "' (expected 1-5, 1*, 2*, 3*)");
}

bool has_intercept(DgpId id) {
  return id == DgpId::d1s || id == DgpId::d2s || id == DgpId::d3s;
}

void validate(const DgpSpec& spec) {
  if (spec.q < 1) throw InvalidArgument("dgp: q must be >= 1");
  if (spec.n < 1) throw InvalidArgument("dgp: n must be >= 1");
  if (!(spec.c >= 0.0) || !std::isfinite(spec.c)) throw InvalidArgument("dgp: c must be >= 0");
  if (!has_intercept(spec.id) && spec.q / 10 < 1) {
    throw InvalidArgument("dgp: ids 1-5 need q >= 10 so that floor(q/10) >= 1");
  }
}

Vector null_coefficients(Index q) {
  Vector theta = Vector::Zero(q);
  theta.head(q / 10).setOnes();
  return theta;
}

Dataset gen_dgp(const DgpSpec& spec, Rng& rng) {
  validate(spec);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const Index n = spec.n, q = spec.q;
  Dataset d;
  d.X.resize(n, q);
  d.y.resize(n);
  d.intercept = has_intercept(spec.id);

  if (!d.intercept) {
    const Index p = q / 10;
    const double c = spec.c;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < q; ++j) d.X(i, j) = z(rng);
      const double idx = d.X.row(i).head(p).sum();
      double mean = idx;
      switch (spec.id) {
        case DgpId::d2: mean += c * std::exp(-idx * idx); break;
        case DgpId::d3: mean += 3.0 * c * std::cos(0.6 * std::numbers::pi * idx); break;
        case DgpId::d4: mean += 0.5 * c * idx * idx; break;
        case DgpId::d5: mean += 0.5 * c * std::exp(0.25 * idx); break;
        default: break;
      }
      d.y(i) = mean + z(rng);
    }
    return d;
  }

  // Variances 1 + 0.1 (i - half) for the normal block of the 2*/3* designs (1-based i).
  const Index half = q / 2;
  const double root_n = std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < q; ++j) {
      if (j < half) {
        d.X(i, j) = u01(rng);
      } else if (spec.id == DgpId::d1s) {
        d.X(i, j) = z(rng);
      } else {
        const double var = 1.0 + 0.1 * static_cast<double>(j + 1 - half);
        d.X(i, j) = std::sqrt(var) * z(rng);
      }
    }
    double mean = spec.beta0 + spec.beta * d.X.row(i).sum();
    if (spec.id == DgpId::d2s) mean += d.X.row(i).norm();
    if (spec.id == DgpId::d3s) mean += d.X.row(i).norm() / root_n;
    d.y(i) = mean + z(rng);
  }
  return d;
}

Dataset gen_dgp(const DgpSpec& spec) {
  Rng rng(spec.seed);
  return gen_dgp(spec, rng);
}

std::string_view to_string(TestKind k) {
  switch (k) {
    case TestKind::nusvm: return "nusvm";
    case TestKind::ocsvm: return "ocsvm";
    case TestKind::gp: return "gp";
    case TestKind::kcm: return "kcm";
    case TestKind::icm: return "icm";
  }
  return "?";
}

TestKind parse_test_kind(std::string_view name) {
  if (name == "nusvm") return TestKind::nusvm;
  if (name == "ocsvm") return TestKind::ocsvm;
  if (name == "gp") return TestKind::gp;
  if (name == "kcm") return TestKind::kcm;
  if (name == "icm") return TestKind::icm;
  throw InvalidArgument("unknown test '" + std::string(name) +
                        "' (expected nusvm|ocsvm|kcm|gp|icm)");
}

bool is_svm(TestKind k) { return k == TestKind::nusvm || k == TestKind::ocsvm; }

void validate(const McConfig& cfg) {
  if (cfg.R < 1) throw InvalidArgument("mc: R must be >= 1");
  if (cfg.B < 1) throw InvalidArgument("mc: B must be >= 1");
  if (cfg.workers < 1) throw InvalidArgument("mc: workers must be >= 1");
  if (cfg.levels.empty()) throw InvalidArgument("mc: no levels");
  for (double a : cfg.levels) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("mc: levels must lie in (0, 1)");
  }
  if (cfg.tests.empty()) throw InvalidArgument("mc: no tests");
  if (!(cfg.nu > 0.0 && cfg.nu <= 1.0)) throw InvalidArgument("mc: nu must lie in (0, 1]");
  if (cfg.bandwidth) make_kernel(*cfg.bandwidth);
  make_kernel(cfg.icm_bandwidth);
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
    throw InvalidArgument("mc: train fraction must lie in (0, 1)");
  }
}

const McCell& McReport::find(TestKind test, DgpId dgp, Index q, Index n, double level,
                             std::string_view mode) const {
  const std::string t(to_string(test)), g = to_string(dgp);
  for (const McCell& c : cells) {
    if (c.test == t && c.dgp == g && c.q == q && c.n == n && c.level == level && c.mode == mode) return c;
  }
  throw InvalidArgument("McReport: no cell for " + t + "/dgp" + g);
}

std::uint64_t replication_seed(std::uint64_t base, const DgpSpec& spec, long rep) {
  const std::uint64_t design =
      derive_seed({static_cast<std::uint64_t>(spec.id), static_cast<std::uint64_t>(spec.q),
                   static_cast<std::uint64_t>(spec.n), std::bit_cast<std::uint64_t>(spec.c),
                   std::bit_cast<std::uint64_t>(spec.beta0), std::bit_cast<std::uint64_t>(spec.beta),
                   spec.seed});
  return derive_seed({base, design, static_cast<std::uint64_t>(rep)});
}

namespace {

struct Outcome {
  bool ok = false;
  std::vector<char> boot;
  std::vector<char> analytic;
  double seconds = 0.0;
};

TestOptions svm_options(const McConfig& cfg, TestKind kind, std::uint64_t seed) {
  TestOptions o;
  o.variant = kind == TestKind::nusvm ? Variant::nu_svm : Variant::ocsvm;
  o.estimator = cfg.estimator;
  o.bandwidth = cfg.bandwidth;
  o.svm.nu = cfg.nu;
  o.bootstrap_residuals = cfg.bootstrap_residuals;
  o.plan = SplitPlan{cfg.train_fraction, derive_seed({seed, 1})};
  o.levels = cfg.levels;
  o.lasso = cfg.lasso;
  if (cfg.bootstrap) {
    o.bootstrap = BootstrapConfig{cfg.B, cfg.multiplier, derive_seed({seed, 2})};
  } else {
    o.bootstrap.reset();
  }
  return o;
}

BaselineOptions baseline_options(const McConfig& cfg, TestKind kind, std::uint64_t seed) {
  BaselineOptions o;
  o.estimator = cfg.estimator;
  o.bandwidth = kind == TestKind::icm ? std::optional<double>(cfg.icm_bandwidth) : cfg.bandwidth;
  o.bootstrap = BootstrapConfig{cfg.B, cfg.multiplier, derive_seed({seed, 2})};
  o.levels = cfg.levels;
  o.lasso = cfg.lasso;
  return o;
}

BaselineKind baseline_kind(TestKind k) {
  if (k == TestKind::icm) return BaselineKind::icm;
  if (k == TestKind::kcm) return BaselineKind::kcm;
  return BaselineKind::gp;
}

Outcome run_one(const McConfig& cfg, const DgpSpec& spec, TestKind kind, long rep) {
  Outcome out;
  const std::size_t nl = cfg.levels.size();
  out.boot.assign(nl, 0);
  out.analytic.assign(nl, 0);
  const std::uint64_t data_seed = replication_seed(cfg.base_seed, spec, rep);
  const std::uint64_t test_seed = derive_seed({data_seed, static_cast<std::uint64_t>(kind)});
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Rng rng(data_seed);
    const Dataset data = gen_dgp(spec, rng);
    if (is_svm(kind)) {
      const TestResult r = run_test(data, svm_options(cfg, kind, test_seed));
      for (std::size_t k = 0; k < nl; ++k) {
        out.analytic[k] = rejects_analytic(r, cfg.levels[k]);
        if (cfg.bootstrap) out.boot[k] = rejects_bootstrap(r, cfg.levels[k]);
      }
    } else {
      const VStatResult r = run_baseline(baseline_kind(kind), data, baseline_options(cfg, kind, test_seed));
      for (std::size_t k = 0; k < nl; ++k) out.boot[k] = rejects(r, cfg.levels[k]);
    }
    out.ok = true;
  } catch (const std::exception&) {
    out.ok = false;
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

McCell make_cell(const DgpSpec& spec, TestKind kind, const McConfig& cfg, std::size_t level_idx,
                 const char* mode, const std::vector<Outcome>& outs, bool analytic) {
  McCell c;
  c.test = std::string(to_string(kind));
  c.dgp = to_string(spec.id);
  c.q = spec.q;
  c.n = spec.n;
  c.estimator = cfg.estimator;
  c.level = cfg.levels[level_idx];
  c.mode = mode;
  c.reps = static_cast<long>(outs.size());
  for (const Outcome& o : outs) {
    c.seconds += o.seconds;
    if (!o.ok) {
      ++c.failures;
      continue;
    }
    c.rejections += analytic ? o.analytic[level_idx] : o.boot[level_idx];
  }
  const long ok = c.reps - c.failures;
  if (ok > 0) {
    c.rate = static_cast<double>(c.rejections) / static_cast<double>(ok);
    c.mc_se = std::sqrt(c.rate * (1.0 - c.rate) / static_cast<double>(ok));
  }
  c.flagged = static_cast<double>(c.failures) > 0.01 * static_cast<double>(c.reps);
  return c;
}

}  // namespace

McReport run_mc(const McConfig& cfg, const std::vector<DgpSpec>& dgps) {
  validate(cfg);
  for (const DgpSpec& d : dgps) validate(d);

  const std::size_t n_cells = dgps.size() * cfg.tests.size();
  const auto R = static_cast<std::size_t>(cfg.R);
  std::vector<std::vector<Outcome>> results(n_cells, std::vector<Outcome>(R));

  std::atomic<std::size_t> next{0};
  const std::size_t total = n_cells * R;
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      const std::size_t cell = job / R, rep = job % R;
      const DgpSpec& spec = dgps[cell / cfg.tests.size()];
      const TestKind kind = cfg.tests[cell % cfg.tests.size()];
      results[cell][rep] = run_one(cfg, spec, kind, static_cast<long>(rep));
    }
  };
  const auto nthreads = static_cast<std::size_t>(std::max(1, cfg.workers));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  McReport report;
  report.config = cfg;
  report.dgps = dgps;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const DgpSpec& spec = dgps[cell / cfg.tests.size()];
    const TestKind kind = cfg.tests[cell % cfg.tests.size()];
    for (std::size_t k = 0; k < cfg.levels.size(); ++k) {
      if (!is_svm(kind) || cfg.bootstrap) {
        report.cells.push_back(make_cell(spec, kind, cfg, k, "bootstrap", results[cell], false));
      }
      if (is_svm(kind)) {
        report.cells.push_back(make_cell(spec, kind, cfg, k, "analytic", results[cell], true));
      }
    }
  }
  return report;
}

namespace {

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace

TimeProfile time_profile(const TimeProfileOptions& opts) {
  if (opts.n_grid.size() < 2) throw InvalidArgument("time_profile: need at least two sample sizes");
  if (opts.reps < 1) throw InvalidArgument("time_profile: reps must be >= 1");
  if (opts.tests.empty()) throw InvalidArgument("time_profile: no tests");
  TimeProfile prof;
  for (TestKind kind : opts.tests) {
    std::vector<double> ns, secs;
    for (Index n : opts.n_grid) {
      std::vector<double> boot, total;
      for (int rep = 0; rep < opts.reps; ++rep) {
        DgpSpec spec{opts.dgp, opts.q, n};
        const std::uint64_t seed = replication_seed(opts.seed, spec, rep);
        Rng rng(seed);
        const Dataset data = gen_dgp(spec, rng);
        const auto t0 = std::chrono::steady_clock::now();
        double b = 0.0;
        if (is_svm(kind)) {
          TestOptions o;
          o.variant = kind == TestKind::nusvm ? Variant::nu_svm : Variant::ocsvm;
          o.plan.seed = derive_seed({seed, 1});
          o.bootstrap = BootstrapConfig{opts.B, Multiplier::mammen, derive_seed({seed, 2})};
          b = run_test(data, o).bootstrap_seconds;
        } else {
          BaselineOptions o;
          if (kind == TestKind::icm) o.bandwidth = 2.0;
          o.bootstrap = BootstrapConfig{opts.B, Multiplier::mammen, derive_seed({seed, 2})};
          b = run_baseline(baseline_kind(kind), data, o).bootstrap_seconds;
        }
        total.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        boot.push_back(b);
      }
      TimingRow row;
      row.test = std::string(to_string(kind));
      row.n = n;
      row.bootstrap_seconds = median(boot);
      row.total_seconds = median(total);
      row.reps = opts.reps;
      prof.rows.push_back(row);
      ns.push_back(static_cast<double>(n));
      secs.push_back(std::max(row.bootstrap_seconds, 1e-9));
    }
    prof.exponent[std::string(to_string(kind))] = loglog_slope(ns, secs);
  }
  return prof;
}

}  // namespace spectest
