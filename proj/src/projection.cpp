#include "spectest/projection.hpp"

#include <limits>
#include <string>

namespace spectest {

namespace {
constexpr double kConditionLimit = 1e12;
constexpr double kRidgeScale = 1e-10;
}  // namespace

Projector::Projector(Matrix scores) : G_(std::move(scores)) {
  const Index n = G_.rows();
  const Index d = G_.cols();
  if (d == 0) return;  // identity
  if (n <= d) {
    throw DegenerateData("build_projector: need more rows than score columns (n=" +
                         std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }
  if (!G_.allFinite()) throw InvalidArgument("build_projector: non-finite scores");
  if (G_.cwiseAbs().maxCoeff() == 0.0) throw DegenerateData("build_projector: all-zero scores");

  Matrix gram = G_.transpose() * G_;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (condition_ > kConditionLimit) {
    ridge_ = kRidgeScale * gram.trace() / static_cast<double>(d);
    gram.diagonal().array() += ridge_;
  }
  factor_.compute(gram);
  if (factor_.info() != Eigen::Success) {
    throw DegenerateData("build_projector: score Gram matrix could not be factored");
  }
}

Vector Projector::apply(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != G_.rows()) {
    throw InvalidArgument("project: vector length " + std::to_string(v.size()) +
                          " does not match projector size " + std::to_string(G_.rows()));
  }
  if (G_.cols() == 0) return v;
  const Vector coef = factor_.solve(G_.transpose() * v);
  return v - G_ * coef;
}

Matrix Projector::apply_columns(const Eigen::Ref<const Matrix>& K) const {
  if (K.rows() != G_.rows()) {
    throw InvalidArgument("project_kernel_columns: matrix has " + std::to_string(K.rows()) +
                          " rows, projector expects " + std::to_string(G_.rows()));
  }
  if (G_.cols() == 0) return K;
  const Matrix coef = factor_.solve(G_.transpose() * K);
  return K - G_ * coef;
}

Projector build_projector(const Eigen::Ref<const Matrix>& G) { return Projector(Matrix(G)); }

Vector project(const Projector& p, const Eigen::Ref<const Vector>& v) { return p.apply(v); }

Matrix project_kernel_columns(const Projector& p, const Eigen::Ref<const Matrix>& K) {
  return p.apply_columns(K);
}

}  // namespace spectest
