#pragma once

#include "spectest/common.hpp"

namespace spectest {

/// Implicit I - G (G'G)^{-1} G'. Never forms the n x n matrix; every
/// application solves the d x d system through a stored Cholesky factor.
///
/// When G'G is ill-conditioned (eigenvalue ratio above 1e12) a ridge of
/// 1e-10 * trace / d is added before factoring and recorded in `ridge()`.
/// A score matrix with zero columns yields the identity.
class Projector {
 public:
  explicit Projector(Matrix scores);

  Index rows() const { return G_.rows(); }
  Index d_effective() const { return G_.cols(); }
  double ridge() const { return ridge_; }
  double condition_estimate() const { return condition_; }
  const Matrix& scores() const { return G_; }

  /// v - G solve(G'G, G'v)
  Vector apply(const Eigen::Ref<const Vector>& v) const;
  /// Column-wise apply.
  Matrix apply_columns(const Eigen::Ref<const Matrix>& K) const;

 private:
  Matrix G_;
  Eigen::LLT<Matrix> factor_;
  double ridge_ = 0.0;
  double condition_ = 1.0;
};

Projector build_projector(const Eigen::Ref<const Matrix>& G);

Vector project(const Projector& p, const Eigen::Ref<const Vector>& v);

/// Projected kernel columns K_p = Pi K. Because Pi is symmetric and
/// idempotent, e' (Pi K) equals (Pi e)' K; callers may use either side.
Matrix project_kernel_columns(const Projector& p, const Eigen::Ref<const Matrix>& K);

}  // namespace spectest
