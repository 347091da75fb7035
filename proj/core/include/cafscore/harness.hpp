// SPDX-License-Identifier: Apache-2.0
//
// Benchmark harness: dataset loading, preference reconstruction from
// independently scored captions, accuracy tables, tie analysis and sweeps.
#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cafscore/fleur.hpp"
#include "cafscore/types.hpp"

namespace cafscore {

/// Reads a JSON Lines file of interchange records. Blank lines are skipped.
/// Throws LoadError("<path>: line N: ...") on the first bad line.
std::vector<Json> read_jsonl(const std::filesystem::path& path);

std::vector<PreferenceItem> load_preference_dataset(const std::filesystem::path& path);
std::vector<RatingItem> load_rating_dataset(const std::filesystem::path& path);

enum class Preference { A, B, Tie };

/// A when a scores higher, B when b does, Tie on exact equality.
Preference reconstruct_preference(double score_a, double score_b);

enum class TiePolicy { zero_credit, half_credit };

std::string_view to_string(TiePolicy p);
TiePolicy parse_tie_policy(std::string_view s);

struct PairScores {
  double a = 0.0;
  double b = 0.0;
};

using PairScoreMap = std::unordered_map<std::string, PairScores>;

struct Tally {
  int correct = 0;
  int ties = 0;
  int total = 0;
  /// Percentage; ties add half a point each under half_credit.
  double accuracy = 0.0;
};

struct SubsetAccuracy {
  std::string subset;
  std::map<PairType, Tally> per_type;
  Tally total;
  double total_accuracy = 0.0;
};

struct AccuracyReport {
  /// Subsets in order of first appearance in the item list.
  std::vector<SubsetAccuracy> subsets;
  /// All subsets pooled, i.e. the sample-count weighted mean.
  SubsetAccuracy overall;
};

/// Scores every item by comparing its two caption scores against the human
/// choice. Throws EvaluationError listing the keys of items without scores.
AccuracyReport pairwise_accuracy(std::span<const PreferenceItem> items, const PairScoreMap& scores,
                                 TiePolicy tie_policy);

struct TieReport {
  std::string model_id;
  int tie_count = 0;
  /// Pairs where both scores are available.
  int pair_count = 0;
  /// Pairs skipped because at least one score was unparseable.
  int excluded_count = 0;
  double tie_rate = 0.0;
  std::map<double, int> tie_value_histogram;
};

using OptionalPair = std::pair<std::optional<double>, std::optional<double>>;

TieReport tie_report(std::string model_id, std::span<const OptionalPair> pairs);

/// Tie report in item order; items missing from `scores` count as excluded.
TieReport tie_report(std::string model_id, std::span<const PreferenceItem> items,
                     const std::unordered_map<std::string, OptionalPair>& scores);

/// Looks up the bundle for (audio_id, caption_id).
class BundleIndex {
 public:
  explicit BundleIndex(std::span<const ScoreBundle> bundles);

  const ScoreBundle* find(const std::string& audio_id, const std::string& caption_id) const;

 private:
  std::map<std::pair<std::string, std::string>, const ScoreBundle*> index_;
};

using BundleMetric = std::function<std::optional<double>(const ScoreBundle&)>;

/// Per-item (a, b) scores for a metric. Items whose bundles are missing or
/// lack the metric are left out, so pairwise_accuracy reports them.
PairScoreMap pair_scores(std::span<const PreferenceItem> items, const BundleIndex& bundles,
                         const BundleMetric& metric);

struct SweepPoint {
  double alpha = 0.0;
  double overall_accuracy = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double best_alpha = 0.0;
  double best_accuracy = 0.0;
  /// Present when every bundle carries an entropy.
  std::optional<double> adaptive_accuracy;
};

/// Recomputes CAF from each bundle's selected S-CLAP and FLEUR for each alpha.
SweepResult alpha_sweep(std::span<const ScoreBundle> bundles, std::span<const PreferenceItem> items,
                        std::span<const double> grid, TiePolicy tie_policy);

struct PoolingRow {
  PoolingStrategy strategy = PoolingStrategy::max;
  AccuracyReport report;
};

/// CAF accuracy at a fixed alpha for each pooling strategy.
std::vector<PoolingRow> pooling_ablation(std::span<const ScoreBundle> bundles,
                                         std::span<const PreferenceItem> items, double alpha,
                                         TiePolicy tie_policy);

}  // namespace cafscore
