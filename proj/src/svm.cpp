#include "spectest/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spectest {

void validate(const SvmConfig& cfg) {
  if (!(cfg.nu > 0.0 && cfg.nu <= 1.0)) {
    throw InvalidArgument("svm: nu must lie in (0, 1], got " + std::to_string(cfg.nu));
  }
  if (!(cfg.tol > 0.0)) throw InvalidArgument("svm: tol must be positive");
  if (cfg.max_iter < 0) throw InvalidArgument("svm: max_iter must be nonnegative");
  if (!(cfg.shift_pad > 0.0) || !std::isfinite(cfg.shift_pad)) {
    throw InvalidArgument("svm: shift_pad must be positive and finite");
  }
}

ShiftResult shift_values(const Eigen::Ref<const Vector>& raw, double pad) {
  if (raw.size() == 0) throw InvalidArgument("shift_values: empty input");
  if (!raw.allFinite()) throw InvalidArgument("shift_values: non-finite input");
  ShiftResult out;
  out.shift = raw.cwiseAbs().maxCoeff() + pad;
  out.shifted = raw.array() + out.shift;
  return out;
}

ShiftedTrainingSet make_one_class_set(const Eigen::Ref<const Matrix>& X,
                                      const Eigen::Ref<const Vector>& eps_p, double pad) {
  if (X.rows() != eps_p.size()) throw InvalidArgument("make_one_class_set: size mismatch");
  const ShiftResult s = shift_values(eps_p, pad);
  ShiftedTrainingSet ts;
  ts.points = X;
  ts.point_of.resize(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) ts.point_of[static_cast<std::size_t>(i)] = i;
  ts.magnitudes = s.shifted;
  ts.shift = s.shift;
  return ts;
}

ShiftedTrainingSet make_two_class_set(const Eigen::Ref<const Matrix>& X,
                                      const Eigen::Ref<const Vector>& y_p,
                                      const Eigen::Ref<const Vector>& m_p, double pad) {
  const Index n = X.rows();
  if (y_p.size() != n || m_p.size() != n) {
    throw InvalidArgument("make_two_class_set: size mismatch");
  }
  Vector joint(2 * n);
  joint << y_p, m_p;
  const ShiftResult s = shift_values(joint, pad);
  ShiftedTrainingSet ts;
  ts.points = X;
  ts.point_of.resize(static_cast<std::size_t>(2 * n));
  ts.labels.resize(2 * n);
  for (Index i = 0; i < 2 * n; ++i) {
    ts.point_of[static_cast<std::size_t>(i)] = i % n;
    ts.labels(i) = i < n ? 1 : -1;
  }
  ts.magnitudes = s.shifted;
  ts.shift = s.shift;
  return ts;
}

namespace {

struct DenseQ {
  const Eigen::Ref<const Matrix>& Q;
  Index size() const { return Q.rows(); }
  double operator()(Index i, Index j) const { return Q(i, j); }
  void column(Index j, Vector& out) const { out = Q.col(j); }
};

// Q_ij = s_i s_j K(map_i, map_j) without materializing the l x l matrix.
struct ScaledGramQ {
  const Matrix& K;
  const Vector& s;
  const std::vector<Index>& map;
  Index size() const { return s.size(); }
  double operator()(Index i, Index j) const {
    return s(i) * s(j) * K(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]);
  }
  void column(Index j, Vector& out) const {
    const Index mj = map[static_cast<std::size_t>(j)];
    const double sj = s(j);
    out.resize(s.size());
    for (Index i = 0; i < s.size(); ++i) out(i) = s(i) * sj * K(map[static_cast<std::size_t>(i)], mj);
  }
};

// Box-and-group-sum QP shared by both duals:
//   min 1/2 a'Qa  s.t. 0 <= a_i <= C, sum_{i in g} a_i = target_g.
struct GroupedProblem {
  double C = 0.0;
  std::vector<int> group;
  std::vector<double> target;
};

struct Violation {
  double gap = -std::numeric_limits<double>::infinity();
  Index up = -1;    // multiplier to increase
  Index down = -1;  // multiplier to decrease
};

Violation worst_pair(const Vector& alpha, const Vector& grad, const GroupedProblem& prob) {
  const std::size_t ng = prob.target.size();
  std::vector<Index> up(ng, -1), down(ng, -1);
  for (Index i = 0; i < alpha.size(); ++i) {
    const auto g = static_cast<std::size_t>(prob.group[static_cast<std::size_t>(i)]);
    if (alpha(i) < prob.C && (up[g] < 0 || grad(i) < grad(up[g]))) up[g] = i;
    if (alpha(i) > 0.0 && (down[g] < 0 || grad(i) > grad(down[g]))) down[g] = i;
  }
  Violation best;
  for (std::size_t g = 0; g < ng; ++g) {
    if (up[g] < 0 || down[g] < 0) continue;
    const double gap = grad(down[g]) - grad(up[g]);
    if (gap > best.gap) best = Violation{gap, up[g], down[g]};
  }
  if (best.up < 0) best.gap = 0.0;
  return best;
}

// libsvm-style margin recovery: mean gradient over free multipliers of each
// group, midpoint of the bound-implied interval when none are free.
std::vector<double> group_levels(const Vector& alpha, const Vector& grad,
                                 const GroupedProblem& prob) {
  const std::size_t ng = prob.target.size();
  std::vector<double> sum(ng, 0.0), ub(ng, std::numeric_limits<double>::infinity()),
      lb(ng, -std::numeric_limits<double>::infinity());
  std::vector<long> nfree(ng, 0);
  for (Index i = 0; i < alpha.size(); ++i) {
    const auto g = static_cast<std::size_t>(prob.group[static_cast<std::size_t>(i)]);
    if (alpha(i) >= prob.C) {
      lb[g] = std::max(lb[g], grad(i));
    } else if (alpha(i) <= 0.0) {
      ub[g] = std::min(ub[g], grad(i));
    } else {
      ++nfree[g];
      sum[g] += grad(i);
    }
  }
  std::vector<double> level(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    if (nfree[g] > 0) {
      level[g] = sum[g] / static_cast<double>(nfree[g]);
    } else if (std::isfinite(ub[g]) && std::isfinite(lb[g])) {
      level[g] = 0.5 * (ub[g] + lb[g]);
    } else {
      level[g] = std::isfinite(ub[g]) ? ub[g] : lb[g];
    }
  }
  return level;
}

template <typename QMat>
Vector full_gradient(const QMat& Q, const Vector& alpha) {
  Vector grad = Vector::Zero(alpha.size());
  Vector col;
  for (Index j = 0; j < alpha.size(); ++j) {
    if (alpha(j) == 0.0) continue;
    Q.column(j, col);
    grad.noalias() += alpha(j) * col;
  }
  return grad;
}

// Fill each group in index order: C until the remaining mass is below C, then
// one fractional entry, zeros after.
Vector initial_alpha(const GroupedProblem& prob, Index n) {
  Vector alpha = Vector::Zero(n);
  std::vector<double> remaining = prob.target;
  for (Index i = 0; i < n; ++i) {
    auto& r = remaining[static_cast<std::size_t>(prob.group[static_cast<std::size_t>(i)])];
    const double a = std::min(prob.C, r);
    alpha(i) = a;
    r -= a;
    if (r < 0.0) r = 0.0;
  }
  return alpha;
}

template <typename QMat>
DualSolution smo(const QMat& Q, const GroupedProblem& prob, const SvmConfig& cfg) {
  const Index n = Q.size();
  const long max_iter = cfg.max_iter > 0 ? cfg.max_iter : std::max<long>(10000000L, 100L * n);

  Vector alpha = initial_alpha(prob, n);
  Vector grad = full_gradient(Q, alpha);
  Vector col_up, col_down;

  DualSolution sol;
  Violation v = worst_pair(alpha, grad, prob);
  long iter = 0;
  for (; iter < max_iter && v.gap > cfg.tol; ++iter) {
    const Index i = v.up, j = v.down;
    Q.column(i, col_up);
    Q.column(j, col_down);
    double curvature = col_up(i) + col_down(j) - 2.0 * col_up(j);
    if (curvature <= 0.0) curvature = 1e-12;

    const double room_up = prob.C - alpha(i);
    const double room_down = alpha(j);
    double step = v.gap / curvature;
    if (step >= room_up || step >= room_down) {
      if (room_up <= room_down) {
        step = room_up;
        alpha(i) = prob.C;
        alpha(j) = room_up == room_down ? 0.0 : alpha(j) - step;
      } else {
        step = room_down;
        alpha(j) = 0.0;
        alpha(i) += step;
      }
    } else {
      alpha(i) += step;
      alpha(j) -= step;
    }
    grad.noalias() += step * (col_up - col_down);
    v = worst_pair(alpha, grad, prob);
  }
  if (v.gap > cfg.tol) {
    throw NonConvergence("smo: KKT gap " + std::to_string(v.gap) + " above tolerance after " +
                             std::to_string(iter) + " iterations",
                         v.gap);
  }

  // Restore the group sums exactly; SMO only drifts them by rounding. The
  // correction goes to free multipliers so that bound ones stay on the bound.
  for (std::size_t g = 0; g < prob.target.size(); ++g) {
    double sum = 0.0;
    std::vector<Index> free;
    for (Index k = 0; k < n; ++k) {
      if (prob.group[static_cast<std::size_t>(k)] != static_cast<int>(g)) continue;
      sum += alpha(k);
      if (alpha(k) > 0.0 && alpha(k) < prob.C) free.push_back(k);
    }
    if (sum <= 0.0) continue;
    if (!free.empty()) {
      const double shift = (prob.target[g] - sum) / static_cast<double>(free.size());
      for (Index k : free) alpha(k) = std::clamp(alpha(k) + shift, 0.0, prob.C);
    } else {
      const double ratio = prob.target[g] / sum;
      for (Index k = 0; k < n; ++k)
        if (prob.group[static_cast<std::size_t>(k)] == static_cast<int>(g))
          alpha(k) = std::clamp(alpha(k) * ratio, 0.0, prob.C);
    }
  }

  sol.alpha = alpha;
  sol.gradient = full_gradient(Q, alpha);
  sol.objective = 0.5 * alpha.dot(sol.gradient);
  sol.kkt_gap = worst_pair(alpha, sol.gradient, prob).gap;
  sol.iterations = iter;
  const std::vector<double> level = group_levels(alpha, sol.gradient, prob);
  if (level.size() == 1) {
    sol.rho = level[0];
  } else {
    sol.rho = 0.5 * (level[0] + level[1]);
    sol.bias = -0.5 * (level[0] - level[1]);
  }
  return sol;
}

GroupedProblem one_class_problem(Index n, double nu) {
  if (n < 2) throw InvalidArgument("one-class svm: need at least two training points");
  if (nu * static_cast<double>(n) < 1.0) {
    throw InvalidArgument("one-class svm: infeasible, nu * n = " +
                          std::to_string(nu * static_cast<double>(n)) + " < 1");
  }
  GroupedProblem prob;
  prob.C = 1.0 / (nu * static_cast<double>(n));
  prob.group.assign(static_cast<std::size_t>(n), 0);
  prob.target = {1.0};
  return prob;
}

GroupedProblem two_class_problem(const Eigen::Ref<const Eigen::VectorXi>& labels, double nu) {
  const Index l = labels.size();
  Index pos = 0, neg = 0;
  GroupedProblem prob;
  prob.group.resize(static_cast<std::size_t>(l));
  for (Index i = 0; i < l; ++i) {
    if (labels(i) == 1) {
      ++pos;
      prob.group[static_cast<std::size_t>(i)] = 0;
    } else if (labels(i) == -1) {
      ++neg;
      prob.group[static_cast<std::size_t>(i)] = 1;
    } else {
      throw InvalidArgument("nu-svc: labels must be +1 or -1");
    }
  }
  if (pos == 0 || neg == 0) throw InvalidArgument("nu-svc: both classes must be present");
  const double limit = 2.0 * static_cast<double>(std::min(pos, neg)) / static_cast<double>(l);
  if (nu > limit + 1e-12) {
    throw InvalidArgument("nu-svc: infeasible nu " + std::to_string(nu) + " (max " +
                          std::to_string(limit) + ")");
  }
  // sum l_i a_i = 0 and sum a_i = nu  <=>  each class sums to nu / 2.
  prob.C = 1.0 / static_cast<double>(l);
  prob.target = {0.5 * nu, 0.5 * nu};
  return prob;
}

void check_square(const Eigen::Ref<const Matrix>& Q, Index n, const char* who) {
  if (Q.rows() != Q.cols() || Q.rows() != n) {
    throw InvalidArgument(std::string(who) + ": Q must be square and match the problem size");
  }
  if (!Q.allFinite()) throw InvalidArgument(std::string(who) + ": non-finite Q");
}

}  // namespace

DualSolution solve_one_class_dual(const Eigen::Ref<const Matrix>& Q, double nu,
                                  const SvmConfig& cfg) {
  SvmConfig c = cfg;
  c.nu = nu;
  validate(c);
  check_square(Q, Q.rows(), "solve_one_class_dual");
  return smo(DenseQ{Q}, one_class_problem(Q.rows(), nu), c);
}

DualSolution solve_nu_svc_dual(const Eigen::Ref<const Matrix>& Q,
                               const Eigen::Ref<const Eigen::VectorXi>& labels, double nu,
                               const SvmConfig& cfg) {
  SvmConfig c = cfg;
  c.nu = nu;
  validate(c);
  check_square(Q, labels.size(), "solve_nu_svc_dual");
  return smo(DenseQ{Q}, two_class_problem(labels, nu), c);
}

namespace {

Vector signed_magnitudes(const ShiftedTrainingSet& ts) {
  Vector s = ts.magnitudes;
  if (ts.labels.size() == s.size()) s.array() *= ts.labels.cast<double>().array();
  return s;
}

void check_training_set(const ShiftedTrainingSet& ts, bool two_class) {
  const Index l = ts.size();
  if (static_cast<Index>(ts.point_of.size()) != l) {
    throw InvalidArgument("svm: point map does not match training set size");
  }
  for (Index r : ts.point_of) {
    if (r < 0 || r >= ts.points.rows()) throw InvalidArgument("svm: point index out of range");
  }
  if (!(ts.magnitudes.array() > 0.0).all()) {
    throw InvalidArgument("svm: shifted magnitudes must be strictly positive");
  }
  if (two_class && ts.labels.size() != l) throw InvalidArgument("nu-svc: missing labels");
  if (!two_class && ts.labels.size() != 0) {
    throw InvalidArgument("one-class svm: training set carries class labels");
  }
}

}  // namespace

Direction extract_direction(const ShiftedTrainingSet& ts, const DualSolution& sol) {
  const Vector s = signed_magnitudes(ts);
  const double floor = 1e-8 * sol.alpha.maxCoeff();
  Direction d;
  for (Index i = 0; i < sol.alpha.size(); ++i) {
    if (sol.alpha(i) > floor) d.support_indices.push_back(i);
  }
  if (d.support_indices.empty()) {
    Index best = 0;
    sol.alpha.maxCoeff(&best);
    d.support_indices.push_back(best);
    d.singleton_fallback = true;
  }
  const auto m = static_cast<Index>(d.support_indices.size());
  d.weights.resize(m);
  d.support_points.resize(m, ts.points.cols());
  for (Index k = 0; k < m; ++k) {
    const Index i = d.support_indices[static_cast<std::size_t>(k)];
    d.weights(k) = sol.alpha(i) * s(i);
    d.support_points.row(k) = ts.points.row(ts.point_of[static_cast<std::size_t>(i)]);
  }
  d.rho = sol.rho;
  d.bias = sol.bias;
  d.alphas = sol.alpha;
  d.objective = sol.objective;
  d.kkt_gap = sol.kkt_gap;
  d.iterations = sol.iterations;
  return d;
}

Direction train_ocsvm(const ShiftedTrainingSet& ts, const KernelSpec& kspec,
                      const SvmConfig& cfg) {
  validate(cfg);
  check_training_set(ts, false);
  const GroupedProblem prob = one_class_problem(ts.size(), cfg.nu);
  const Matrix K = gram(ts.points, kspec);
  const Vector s = signed_magnitudes(ts);
  return extract_direction(ts, smo(ScaledGramQ{K, s, ts.point_of}, prob, cfg));
}

Direction train_nu_svc(const ShiftedTrainingSet& ts, const KernelSpec& kspec,
                       const SvmConfig& cfg) {
  validate(cfg);
  check_training_set(ts, true);
  const GroupedProblem prob = two_class_problem(ts.labels, cfg.nu);
  const Matrix K = gram(ts.points, kspec);
  const Vector s = signed_magnitudes(ts);
  return extract_direction(ts, smo(ScaledGramQ{K, s, ts.point_of}, prob, cfg));
}

}  // namespace spectest
