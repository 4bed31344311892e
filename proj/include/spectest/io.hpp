#pragma once

#include "spectest/baselines.hpp"
#include "spectest/common.hpp"
#include "spectest/simulation.hpp"
#include "spectest/testing.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace spectest {

/// Header row required; every other column becomes a covariate in header order.
/// Errors (InvalidArgument): unreadable or empty file, missing response column,
/// ragged rows, non-numeric cells (message names row and column).
Dataset load_csv(const std::string& path, const std::string& response_column);
Dataset read_csv(std::istream& in, const std::string& response_column);

/// Writes x1..xq then the response, full round-trip precision.
void write_csv(std::ostream& out, const Dataset& data, const std::string& response_column = "y");
void write_csv(const std::string& path, const Dataset& data, const std::string& response_column = "y");

nlohmann::ordered_json to_json(const TestResult& r);
/// Same field names as TestResult; SVM-only fields are null.
nlohmann::ordered_json to_json(const VStatResult& r);
nlohmann::ordered_json to_json(const McReport& report);
nlohmann::ordered_json to_json(const TimeProfile& profile);

/// One row per cell x level: test,dgp,q,n,estimator,level,mode,rate,mc_se,reps,seconds
void write_csv(std::ostream& out, const McReport& report);
/// test,n,bootstrap_seconds,total_seconds,reps and one exponent row per test.
void write_csv(std::ostream& out, const TimeProfile& profile);

}  // namespace spectest
