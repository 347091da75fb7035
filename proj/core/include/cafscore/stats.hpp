// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cafscore {

struct CorrelationReport {
  double lcc = 0.0;
  double srcc = 0.0;
  double ktau = 0.0;
  std::size_t n = 0;
};

/// Sample Pearson correlation. Throws UndefinedCorrelation on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// 1-based ranks; tied values share the mean of their rank span.
std::vector<double> average_ranks(std::span<const double> xs);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Kendall tau-b, computed with Knight's O(n log n) merge-sort algorithm.
/// Throws UndefinedCorrelation when either axis is entirely tied.
double kendall_tau(std::span<const double> xs, std::span<const double> ys);

CorrelationReport correlate(std::span<const double> xs, std::span<const double> ys);

}  // namespace cafscore
