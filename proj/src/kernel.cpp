#include "spectest/kernel.hpp"

#include <algorithm>
#include <vector>

namespace spectest {

KernelSpec median_heuristic(const Eigen::Ref<const Matrix>& X) {
  const Index n = X.rows();
  if (n < 2) throw InvalidArgument("median_heuristic: need at least two points");
  if (!X.allFinite()) throw InvalidArgument("median_heuristic: non-finite covariates");

  const Matrix D = squared_distances(X, X);
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j)
    for (Index i = 0; i < j; ++i) dist.push_back(std::sqrt(D(i, j)));

  const std::size_t m = dist.size();
  const std::size_t mid = m / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (m % 2 == 0) {
    const double lower =
        *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  if (!(median > 0.0)) {
    throw DegenerateData("median_heuristic: median pairwise distance is zero (coincident points)");
  }
  return KernelSpec{median};
}

}  // namespace spectest
