#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectest {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error taxonomy. The CLI maps these onto exit codes:
//   InvalidArgument -> 1, DegenerateData -> 2, NonConvergence -> 3.

/// Malformed input: dimension mismatch, out-of-range parameter, bad flag.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data cannot support the requested computation (zero variance,
/// rank-deficient design, split too small, coincident points).
class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap before meeting tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double final_gap)
      : std::runtime_error(what), final_gap_(final_gap) {}
  double final_gap() const noexcept { return final_gap_; }

 private:
  double final_gap_;
};

/// Covariates plus response. `intercept` marks models that carry a constant
/// term; the covariate matrix itself never contains the ones column.
struct Dataset {
  Matrix X;
  Vector y;
  bool intercept = false;

  Index n() const { return X.rows(); }
  Index q() const { return X.cols(); }
  /// Number of score columns for the linear model (q, plus one with intercept).
  Index score_dim() const { return X.cols() + (intercept ? 1 : 0); }
};

/// Throws InvalidArgument unless X and y agree and every entry is finite.
void validate(const Dataset& data);

/// Rows of `data` selected by `rows`, in the given order.
Dataset subset(const Dataset& data, const std::vector<Index>& rows);

}  // namespace spectest
