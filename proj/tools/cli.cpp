#include "cli.hpp"

#include "spectest/baselines.hpp"
#include "spectest/io.hpp"
#include "spectest/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace spectest::cli {

std::optional<double> parse_sigma(const std::string& text) {
  if (text == "median") return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgument("--sigma must be 'median' or a positive number, got '" + text + "'");
  }
  return v;
}

namespace {

std::vector<TestKind> test_kinds(const RunConfig& cfg) {
  std::vector<TestKind> kinds;
  for (const auto& t : cfg.tests) kinds.push_back(parse_test_kind(t));
  return kinds;
}

bool any_baseline(const std::vector<TestKind>& kinds) {
  return std::any_of(kinds.begin(), kinds.end(), [](TestKind k) { return !is_svm(k); });
}

std::vector<DgpSpec> dgp_grid(const RunConfig& cfg) {
  std::vector<DgpSpec> out;
  for (const auto& id : cfg.dgps) {
    for (long q : cfg.q) {
      for (long n : cfg.n) {
        DgpSpec s;
        s.id = parse_dgp(id);
        s.q = q;
        s.n = n;
        s.c = cfg.c;
        s.beta0 = cfg.beta0;
        s.beta = cfg.beta;
        out.push_back(s);
      }
    }
  }
  return out;
}

McConfig mc_config(const RunConfig& cfg) {
  McConfig mc;
  mc.R = cfg.reps;
  mc.levels = cfg.levels;
  mc.tests = test_kinds(cfg);
  mc.estimator = cfg.estimator;
  mc.workers = cfg.workers;
  mc.base_seed = cfg.seed;
  mc.nu = cfg.nu;
  mc.bandwidth = parse_sigma(cfg.sigma);
  mc.train_fraction = cfg.train_frac.value_or(0.1);
  mc.multiplier = cfg.multiplier;
  mc.bootstrap_residuals = cfg.boot_residuals;
  mc.bootstrap = cfg.B > 0;
  mc.B = std::max(cfg.B, 1);
  return mc;
}

TestOptions test_options(const RunConfig& cfg, TestKind kind) {
  TestOptions o;
  o.variant = kind == TestKind::nusvm ? Variant::nu_svm : Variant::ocsvm;
  o.estimator = cfg.estimator;
  o.bandwidth = parse_sigma(cfg.sigma);
  o.svm.nu = cfg.nu;
  o.bootstrap_residuals = cfg.boot_residuals;
  o.plan = SplitPlan{cfg.train_frac.value_or(0.6), derive_seed({cfg.seed, 1})};
  o.levels = cfg.levels;
  if (cfg.B > 0) {
    o.bootstrap = BootstrapConfig{cfg.B, cfg.multiplier, derive_seed({cfg.seed, 2})};
  } else {
    o.bootstrap.reset();
  }
  return o;
}

BaselineOptions baseline_options(const RunConfig& cfg, TestKind kind) {
  BaselineOptions o;
  o.estimator = cfg.estimator;
  o.bandwidth = parse_sigma(cfg.sigma);
  if (kind == TestKind::icm && !o.bandwidth) o.bandwidth = 2.0;
  o.bootstrap = BootstrapConfig{cfg.B, cfg.multiplier, derive_seed({cfg.seed, 2})};
  o.levels = cfg.levels;
  return o;
}

std::string flatten_csv(const nlohmann::ordered_json& j) {
  std::ostringstream head, row;
  bool first = true;
  auto emit = [&](const std::string& key, const nlohmann::ordered_json& v) {
    head << (first ? "" : ",") << key;
    row << (first ? "" : ",");
    if (v.is_string()) {
      row << v.get<std::string>();
    } else if (!v.is_null()) {
      row << v.dump();
    }
    first = false;
  };
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) emit(key + "_" + k2, v2);
    } else {
      emit(key, value);
    }
  }
  return head.str() + "\n" + row.str() + "\n";
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.format != "json" && cfg.format != "csv") throw InvalidArgument("--format must be json or csv");
  if (cfg.B < 0) throw InvalidArgument("--bootstrap must be >= 0");
  if (cfg.workers < 1) throw InvalidArgument("--workers must be >= 1");
  if (!(cfg.nu > 0.0 && cfg.nu <= 1.0)) throw InvalidArgument("--nu must lie in (0, 1]");
  if (cfg.levels.empty()) throw InvalidArgument("--levels needs at least one level");
  for (double a : cfg.levels) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("--levels must lie in (0, 1)");
  }
  if (cfg.train_frac && !(*cfg.train_frac > 0.0 && *cfg.train_frac < 1.0)) {
    throw InvalidArgument("--train-frac must lie in (0, 1)");
  }
  parse_sigma(cfg.sigma);
  const std::vector<TestKind> kinds = test_kinds(cfg);
  if (kinds.empty()) throw InvalidArgument("--variant needs at least one test");
  if (cfg.B == 0 && any_baseline(kinds)) {
    throw InvalidArgument("kcm, gp and icm need --bootstrap >= 1");
  }
  if (cfg.subcommand == "test") {
    if (cfg.input.empty()) throw InvalidArgument("test: --input is required");
    if (kinds.size() != 1) throw InvalidArgument("test: exactly one --variant");
  }
  if (cfg.subcommand == "simulate" || cfg.subcommand == "bench") {
    if (cfg.reps < 1) throw InvalidArgument("--reps must be >= 1");
    for (const DgpSpec& s : dgp_grid(cfg)) spectest::validate(s);
  }
  if (cfg.subcommand == "simulate") spectest::validate(mc_config(cfg));
  if (cfg.subcommand == "bench") {
    if (cfg.n.size() < 2) throw InvalidArgument("bench: give at least two --n values");
    if (cfg.dgps.size() != 1 || cfg.q.size() != 1) throw InvalidArgument("bench: one --dgp and one --q");
    if (cfg.B < 1) throw InvalidArgument("bench: --bootstrap must be >= 1");
  }
}

int cmd_test(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const TestKind kind = parse_test_kind(cfg.tests.front());
  if (is_svm(kind)) spectest::validate(test_options(cfg, kind));
  Dataset data = load_csv(cfg.input, cfg.response);
  data.intercept = cfg.intercept;
  nlohmann::ordered_json j;
  if (is_svm(kind)) {
    j = to_json(run_test(data, test_options(cfg, kind)));
  } else {
    const BaselineKind b = kind == TestKind::icm ? BaselineKind::icm
                           : kind == TestKind::kcm ? BaselineKind::kcm
                                                   : BaselineKind::gp;
    j = to_json(run_baseline(b, data, baseline_options(cfg, kind)));
  }
  if (cfg.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    out << flatten_csv(j);
  }
  return ok;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const McReport report = run_mc(mc_config(cfg), dgp_grid(cfg));
  if (cfg.format == "json") {
    out << to_json(report).dump(2) << '\n';
  } else {
    write_csv(out, report);
  }
  for (const McCell& c : report.cells) {
    if (c.flagged) {
      std::cerr << "warning: " << c.test << " dgp" << c.dgp << " q=" << c.q << " n=" << c.n << " had "
                << c.failures << " failed replications\n";
    }
  }
  return ok;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  TimeProfileOptions o;
  o.tests = test_kinds(cfg);
  o.n_grid.assign(cfg.n.begin(), cfg.n.end());
  o.reps = cfg.reps;
  o.q = cfg.q.front();
  o.dgp = parse_dgp(cfg.dgps.front());
  o.B = cfg.B;
  o.seed = cfg.seed;
  const TimeProfile prof = time_profile(o);
  if (cfg.format == "json") {
    out << to_json(prof).dump(2) << '\n';
  } else {
    write_csv(out, prof);
  }
  return ok;
}

namespace {

void add_common(CLI::App& sub, RunConfig& cfg, std::string& estimator, std::string& multiplier,
                std::string& boot_residuals, std::optional<std::uint64_t>& seed) {
  sub.add_option("--variant", cfg.tests, "nusvm|ocsvm|kcm|gp|icm")->delimiter(',');
  sub.add_option("--estimator", estimator, "ols|lasso");
  sub.add_option("--nu", cfg.nu, "SVM nu");
  sub.add_option("--sigma", cfg.sigma, "median or a fixed Gaussian bandwidth");
  sub.add_option("--bootstrap", cfg.B, "bootstrap replications (0: analytic only)");
  sub.add_option("--multiplier", multiplier, "mammen|rademacher|normal");
  sub.add_option("--boot-residuals", boot_residuals, "SVM bootstrap residual source: test-refit|train-fit");
  sub.add_option("--levels", cfg.levels, "significance levels")->delimiter(',');
  sub.add_option("--train-frac", cfg.train_frac, "fraction of rows used to learn the direction");
  sub.add_option("--seed", seed, "base seed (falls back to SPECTEST_SEED)");
  sub.add_option("--output", cfg.output, "output path (stdout when omitted)");
  sub.add_option("--format", cfg.format, "json|csv");
}

void add_design(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--dgp", cfg.dgps, "1-5, 1*, 2*, 3*")->delimiter(',');
  sub.add_option("--q", cfg.q, "covariate dimension")->delimiter(',');
  sub.add_option("--n", cfg.n, "sample size")->delimiter(',');
  sub.add_option("--reps", cfg.reps, "replications");
  sub.add_option("--c", cfg.c, "deviation scale");
  sub.add_option("--beta0", cfg.beta0, "intercept of the starred designs");
  sub.add_option("--beta", cfg.beta, "common slope of the starred designs");
  sub.add_option("--workers", cfg.workers, "worker threads");
}

void apply_preset(RunConfig& cfg) {
  if (cfg.preset.empty()) return;
  if (cfg.preset != "table1") throw InvalidArgument("unknown --preset '" + cfg.preset + "'");
  cfg.dgps = {"1", "2", "3", "4", "5"};
  cfg.q = {10};
  cfg.n = {200, 400};
  cfg.tests = {"nusvm", "ocsvm", "gp", "kcm", "icm"};
  cfg.estimator = Estimator::ols;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string estimator = "ols", multiplier = "mammen", boot_residuals = "test-refit";
  std::optional<std::uint64_t> seed;

  CLI::App app{"Kernel specification tests for parametric regression"};
  app.require_subcommand(1);
  CLI::App* test = app.add_subcommand("test", "run one test on a CSV file");
  test->add_option("--input", cfg.input, "CSV with a header row")->required();
  test->add_option("--response", cfg.response, "response column name");
  test->add_flag("!--no-intercept", cfg.intercept, "fit the model without a constant");
  add_common(*test, cfg, estimator, multiplier, boot_residuals, seed);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo rejection rates");
  add_common(*simulate, cfg, estimator, multiplier, boot_residuals, seed);
  add_design(*simulate, cfg);
  simulate->add_option("--preset", cfg.preset, "table1");

  CLI::App* bench = app.add_subcommand("bench", "bootstrap-stage timing across sample sizes");
  add_common(*bench, cfg, estimator, multiplier, boot_residuals, seed);
  add_design(*bench, cfg);

  try {
    std::vector<std::string> argv(args.rbegin(), args.rend());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.estimator = parse_estimator(estimator);
    cfg.multiplier = parse_multiplier(multiplier);
    cfg.boot_residuals = parse_bootstrap_residuals(boot_residuals);
    if (seed) {
      cfg.seed = *seed;
    } else if (const char* env = std::getenv("SPECTEST_SEED")) {
      const std::string s(env);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), cfg.seed);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidArgument("SPECTEST_SEED must be a non-negative integer");
      }
    }
    if (cfg.subcommand == "simulate") apply_preset(cfg);
    if (cfg.tests.empty()) {
      cfg.tests = cfg.subcommand == "test" ? std::vector<std::string>{"nusvm"}
                                           : std::vector<std::string>{"nusvm", "ocsvm", "gp", "kcm", "icm"};
    }
    if (cfg.subcommand == "bench" && bench->count("--n") == 0) cfg.n = {200, 400, 800};
    if (cfg.subcommand == "bench" && bench->count("--dgp") == 0) cfg.dgps = {"2"};
    if (cfg.subcommand == "bench" && bench->count("--reps") == 0) cfg.reps = 5;
    if (cfg.subcommand == "simulate" && simulate->count("--workers") == 0) {
      cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    validate(cfg);

    std::ofstream file;
    std::ostream* sink = &out;
    if (!cfg.output.empty()) {
      file.open(cfg.output);
      if (!file) throw InvalidArgument("cannot write '" + cfg.output + "'");
      sink = &file;
    }
    if (cfg.subcommand == "test") return cmd_test(cfg, *sink);
    if (cfg.subcommand == "simulate") return cmd_simulate(cfg, *sink);
    return cmd_bench(cfg, *sink);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const DegenerateData& e) {
    err << "degenerate data: " << e.what() << '\n';
    return degenerate;
  } catch (const NonConvergence& e) {
    err << "solver did not converge: " << e.what() << " (gap " << e.final_gap() << ")\n";
    return nonconvergence;
  }
}

}  // namespace spectest::cli
