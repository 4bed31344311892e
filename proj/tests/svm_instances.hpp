#pragma once

#include "oracles.hpp"

#include "spectest/kernel.hpp"
#include "spectest/stats.hpp"
#include "spectest/svm.hpp"

#include <random>
#include <vector>

namespace oracle {

/// A random dual instance together with everything the oracle needs.
struct DualInstance {
  spectest::ShiftedTrainingSet set;
  spectest::KernelSpec kernel;
  double nu = 0.5;
  Matrix Q;
  std::vector<int> group;
  std::vector<double> totals;
  double cap = 0.0;
};

inline Matrix explicit_q(const spectest::ShiftedTrainingSet& ts, const spectest::KernelSpec& k) {
  const Index l = ts.size();
  Matrix Q(l, l);
  for (Index i = 0; i < l; ++i) {
    for (Index j = 0; j < l; ++j) {
      const double sign = ts.labels.size() == 0 ? 1.0 : double(ts.labels(i) * ts.labels(j));
      Q(i, j) = sign * ts.magnitudes(i) * ts.magnitudes(j) *
                gaussian(ts.points, ts.point_of[std::size_t(i)], ts.points, ts.point_of[std::size_t(j)],
                         k.bandwidth);
    }
  }
  return Q;
}

inline DualInstance one_class_instance(std::uint64_t seed, Index max_n = 25) {
  spectest::Rng rng(seed);
  std::normal_distribution<double> z;
  const Index n = std::uniform_int_distribution<Index>(5, max_n)(rng);
  Matrix X(n, 3);
  Vector eps(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 3; ++j) X(i, j) = z(rng);
    eps(i) = z(rng);
  }
  DualInstance inst;
  inst.nu = std::uniform_real_distribution<double>(1.0 / double(n) + 0.01, 1.0)(rng);
  inst.kernel = spectest::make_kernel(std::uniform_real_distribution<double>(0.5, 6.0)(rng));
  inst.set = spectest::make_one_class_set(X, eps, 0.1);
  inst.Q = explicit_q(inst.set, inst.kernel);
  inst.group.assign(std::size_t(n), 0);
  inst.totals = {1.0};
  inst.cap = 1.0 / (inst.nu * double(n));
  return inst;
}

inline DualInstance two_class_instance(std::uint64_t seed, Index max_points = 12) {
  spectest::Rng rng(seed);
  std::normal_distribution<double> z;
  const Index n = std::uniform_int_distribution<Index>(3, max_points)(rng);
  Matrix X(n, 3);
  Vector y(n), m(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < 3; ++j) X(i, j) = z(rng);
    m(i) = 0.5 * z(rng);
    y(i) = m(i) + z(rng);
  }
  DualInstance inst;
  inst.nu = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  inst.kernel = spectest::make_kernel(std::uniform_real_distribution<double>(0.5, 6.0)(rng));
  inst.set = spectest::make_two_class_set(X, y, m, 0.1);
  inst.Q = explicit_q(inst.set, inst.kernel);
  const Index l = inst.set.size();
  inst.group.resize(std::size_t(l));
  for (Index i = 0; i < l; ++i) inst.group[std::size_t(i)] = inst.set.labels(i) > 0 ? 0 : 1;
  inst.totals = {inst.nu / 2.0, inst.nu / 2.0};
  inst.cap = 1.0 / double(l);
  return inst;
}

}  // namespace oracle
