#pragma once

#include "spectest/model.hpp"
#include "spectest/testing.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spectest::cli {

enum ExitCode : int { ok = 0, usage = 1, degenerate = 2, nonconvergence = 3 };

struct RunConfig {
  std::string subcommand;

  std::string input;
  std::string response = "y";
  bool intercept = true;

  std::vector<std::string> tests;  // --variant, one or more
  Estimator estimator = Estimator::ols;
  double nu = 0.5;
  std::string sigma = "median";
  int B = 500;
  Multiplier multiplier = Multiplier::mammen;
  BootstrapResiduals boot_residuals = BootstrapResiduals::test_refit;
  std::vector<double> levels = {0.10, 0.05, 0.01};
  std::optional<double> train_frac;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output;
  std::string format = "json";

  std::vector<std::string> dgps = {"1"};
  std::vector<long> q = {10};
  std::vector<long> n = {400};
  int reps = 1000;
  double c = 0.25;
  double beta0 = 1.0;
  double beta = 1.0;
  std::string preset;
};

/// Fixed bandwidth, or empty for the median heuristic; throws InvalidArgument.
std::optional<double> parse_sigma(const std::string& text);

/// Throws InvalidArgument on inconsistent flags.
void validate(const RunConfig& cfg);

int cmd_test(const RunConfig& cfg, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);

/// Full entry point: parses argv (without the program name), dispatches,
/// and maps errors onto exit codes. Reports go to --output or `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spectest::cli
