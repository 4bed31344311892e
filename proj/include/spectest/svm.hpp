#pragma once

#include "spectest/common.hpp"
#include "spectest/kernel.hpp"

#include <vector>

namespace spectest {

struct SvmConfig {
  /// nu in (0, 1].
  double nu = 0.5;
  /// Stop when the maximal violating pair gap falls below this.
  double tol = 1e-6;
  /// SMO iteration cap; 0 selects max(1e7, 100 * problem size).
  long max_iter = 0;
  /// Added to max|raw| when shifting magnitudes positive.
  double shift_pad = 0.1;
};

void validate(const SvmConfig& cfg);

struct ShiftResult {
  Vector shifted;
  double shift = 0.0;
};

/// shift = max|raw| + pad, shifted = raw + shift (strictly positive for pad > 0).
ShiftResult shift_values(const Eigen::Ref<const Vector>& raw, double pad);

/// Training entries for either solver. Entry i sits at covariate row
/// points.row(point_of[i]) with positive magnitude magnitudes(i). `labels`
/// is empty for the one-class problem and +-1 for the two-class one.
struct ShiftedTrainingSet {
  Matrix points;
  std::vector<Index> point_of;
  Vector magnitudes;
  Eigen::VectorXi labels;
  double shift = 0.0;

  Index size() const { return magnitudes.size(); }
};

/// One entry per row of X with magnitude eps_p(i) + e, e = max|eps_p| + pad.
ShiftedTrainingSet make_one_class_set(const Eigen::Ref<const Matrix>& X,
                                      const Eigen::Ref<const Vector>& eps_p, double pad);

/// 2n entries: rows 0..n-1 carry the response class (label +1, magnitude
/// y_p + e), rows n..2n-1 the fitted class (label -1, magnitude m_p + e).
/// Both classes share one shift e = max(|y_p|, |m_p|) + pad.
ShiftedTrainingSet make_two_class_set(const Eigen::Ref<const Matrix>& X,
                                      const Eigen::Ref<const Vector>& y_p,
                                      const Eigen::Ref<const Vector>& m_p, double pad);

/// Raw output of the SMO core.
struct DualSolution {
  Vector alpha;
  /// Q alpha at the returned point.
  Vector gradient;
  double objective = 0.0;
  /// Largest violating-pair gap after the final renormalization.
  double kkt_gap = 0.0;
  long iterations = 0;
  /// Margin level shared by free multipliers (mean over the classes for nu-SVC).
  double rho = 0.0;
  /// Offset term of the two-class separating hyperplane; zero for one-class.
  double bias = 0.0;
};

/// min 1/2 a'Qa  s.t. 0 <= a_i <= 1/(nu n), sum a = 1.
DualSolution solve_one_class_dual(const Eigen::Ref<const Matrix>& Q, double nu,
                                  const SvmConfig& cfg = {});

/// min 1/2 a'Qa  s.t. 0 <= a_i <= 1/l, sum l_i a_i = 0, sum a = nu, with Q
/// already carrying the l_i l_j signs.
DualSolution solve_nu_svc_dual(const Eigen::Ref<const Matrix>& Q,
                               const Eigen::Ref<const Eigen::VectorXi>& labels, double nu,
                               const SvmConfig& cfg = {});

/// w = sum_j weights(j) k(support_points.row(j), .)
struct Direction {
  std::vector<Index> support_indices;
  Vector weights;
  Matrix support_points;
  double rho = 0.0;
  double bias = 0.0;
  Vector alphas;
  double objective = 0.0;
  double kkt_gap = 0.0;
  long iterations = 0;
  /// Set when thresholding left nothing and the largest multiplier was kept.
  bool singleton_fallback = false;

  Index size() const { return weights.size(); }
};

/// Support = {i : alpha_i > 1e-8 max alpha}; weights eta_i = alpha_i * signed magnitude.
Direction extract_direction(const ShiftedTrainingSet& ts, const DualSolution& sol);

Direction train_ocsvm(const ShiftedTrainingSet& ts, const KernelSpec& kspec,
                      const SvmConfig& cfg = {});

Direction train_nu_svc(const ShiftedTrainingSet& ts, const KernelSpec& kspec,
                       const SvmConfig& cfg = {});

}  // namespace spectest
