#pragma once

#include "spectest/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace spectest {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive hash of a seed path, e.g. derive_seed({base, cell, rep}).
/// Used so that every replication owns an independent, reproducible stream.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Upper tail of the chi-square(1) distribution: P(X > x) = erfc(sqrt(x / 2)).
double chi2_1_sf(double x);

double normal_cdf(double x);

/// Linear-interpolation quantile (numpy's default), p in [0, 1].
double quantile(std::vector<double> values, double p);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace spectest
