// SPDX-License-Identifier: Apache-2.0
#include "cafscore/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

void check_inputs(std::span<const double> xs, std::span<const double> ys, const char* what) {
  if (xs.size() != ys.size()) throw DomainError(std::string(what) + ": length mismatch");
  if (xs.size() < 2) throw DomainError(std::string(what) + ": need at least two observations");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw DomainError(std::string(what) + ": non-finite observation");
  }
}

// Number of tied pairs inside runs of equal values of a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    auto run_end = std::find_if_not(first, last, [&](const auto& v) { return eq(*first, v); });
    const std::int64_t t = std::distance(first, run_end);
    total += t * (t - 1) / 2;
    first = run_end;
  }
  return total;
}

// Stable merge sort on y, returning the number of inversions (exchanges).
std::int64_t sort_counting_swaps(std::vector<std::pair<double, double>>& v,
                                 std::vector<std::pair<double, double>>& buf, std::size_t lo,
                                 std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_counting_swaps(v, buf, lo, mid) + sort_counting_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j].second < v[i].second) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_inputs(xs, ys, "pearson");
  // Rounding in the mean can leave a constant series with a tiny nonzero spread.
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw UndefinedCorrelation("pearson: zero variance");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    // Positions i..j-1 hold equal values: ranks i+1..j, mean (i+1+j)/2.
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_inputs(xs, ys, "spearman");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  check_inputs(xs, ys, "kendall_tau");
  const auto n = static_cast<std::int64_t>(xs.size());

  std::vector<std::pair<double, double>> v(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = {xs[i], ys[i]};
  std::sort(v.begin(), v.end());

  const std::int64_t n0 = n * (n - 1) / 2;
  const std::int64_t tx = tied_pairs(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const std::int64_t txy = tied_pairs(v.begin(), v.end(), [](const auto& a, const auto& b) { return a == b; });

  std::vector<std::pair<double, double>> buf(v.size());
  const std::int64_t swaps = sort_counting_swaps(v, buf, 0, v.size());
  const std::int64_t ty = tied_pairs(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second == b.second; });

  if (tx == n0 || ty == n0) throw UndefinedCorrelation("kendall_tau: all observations tied on one axis");

  // concordant - discordant = n0 - tx - ty + txy - 2 * swaps
  const double numer = static_cast<double>(n0 - tx - ty + txy - 2 * swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - tx)) * std::sqrt(static_cast<double>(n0 - ty));
  return std::clamp(numer / denom, -1.0, 1.0);
}

CorrelationReport correlate(std::span<const double> xs, std::span<const double> ys) {
  CorrelationReport r;
  r.lcc = pearson(xs, ys);
  r.srcc = spearman(xs, ys);
  r.ktau = kendall_tau(xs, ys);
  r.n = xs.size();
  return r;
}

}  // namespace cafscore
