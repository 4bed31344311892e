#pragma once

#include "spectest/common.hpp"

#include <cmath>
#include <string>

namespace spectest {

/// Gaussian kernel k(x, x') = exp(-||x - x'||^2 / bandwidth).
///
/// The bandwidth divides the *squared* distance directly (no factor of two),
/// so it is measured in squared covariate units.
struct KernelSpec {
  double bandwidth = 1.0;
};

inline KernelSpec make_kernel(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("kernel bandwidth must be positive and finite, got " +
                          std::to_string(bandwidth));
  }
  return KernelSpec{bandwidth};
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar eval_kernel(const Eigen::MatrixBase<DerivedA>& x,
                                      const Eigen::MatrixBase<DerivedB>& y,
                                      const KernelSpec& spec) {
  using Scalar = typename DerivedA::Scalar;
  if (x.size() != y.size()) {
    throw InvalidArgument("eval_kernel: dimension mismatch (" + std::to_string(x.size()) +
                          " vs " + std::to_string(y.size()) + ")");
  }
  make_kernel(spec.bandwidth);
  const Scalar sq = (x.derived().template cast<Scalar>() - y.derived().template cast<Scalar>())
                        .squaredNorm();
  return std::exp(-sq / static_cast<Scalar>(spec.bandwidth));
}

/// Squared Euclidean distances between the rows of A and the rows of B,
/// via ||a||^2 + ||b||^2 - 2 a.b with negatives clamped to zero.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> squared_distances(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B) {
  using Scalar = typename DerivedA::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (A.cols() != B.cols()) {
    throw InvalidArgument("squared_distances: column mismatch (" + std::to_string(A.cols()) +
                          " vs " + std::to_string(B.cols()) + ")");
  }
  const auto a2 = A.rowwise().squaredNorm().eval();
  const auto b2 = B.rowwise().squaredNorm().eval();
  Mat D = A * B.transpose();
  D *= Scalar(-2);
  D.colwise() += a2;
  D.rowwise() += b2.transpose();
  return D.cwiseMax(Scalar(0));
}

/// Cross-Gram matrix: entry (i, j) = k(A_i, B_j).
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> gram(
    const Eigen::MatrixBase<DerivedA>& A, const Eigen::MatrixBase<DerivedB>& B,
    const KernelSpec& spec) {
  using Scalar = typename DerivedA::Scalar;
  make_kernel(spec.bandwidth);
  const Scalar inv = Scalar(1) / static_cast<Scalar>(spec.bandwidth);
  return (squared_distances(A, B) * (-inv)).array().exp().matrix();
}

/// Self-Gram of the rows of A. Exactly symmetric with a unit diagonal.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> gram(
    const Eigen::MatrixBase<Derived>& A, const KernelSpec& spec) {
  using Scalar = typename Derived::Scalar;
  auto K = gram(A, A, spec);
  for (Index j = 0; j < K.cols(); ++j) {
    K(j, j) = Scalar(1);
    for (Index i = j + 1; i < K.rows(); ++i) K(j, i) = K(i, j);
  }
  return K;
}

/// Bandwidth = median of the n(n-1)/2 unsquared pairwise distances (i < j).
/// Even counts take the midpoint of the two central order statistics.
/// Throws DegenerateData when the median distance is zero.
KernelSpec median_heuristic(const Eigen::Ref<const Matrix>& X);

}  // namespace spectest
