// SPDX-License-Identifier: Apache-2.0
#include "cafscore/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cafscore/errors.hpp"
#include "cafscore/fusion.hpp"
#include "cafscore/records.hpp"

namespace cafscore {
namespace {

template <typename T>
std::vector<T> load_items(const std::filesystem::path& path) {
  std::vector<T> items;
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      items.push_back(decode_as<T>(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw LoadError(path.string() + ": line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    } catch (const DomainError& e) {
      throw LoadError(path.string() + ": line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return items;
}

double percent(double credit, int total) { return total > 0 ? 100.0 * credit / total : 0.0; }

void finish(Tally& t, TiePolicy policy) {
  const double credit = t.correct + (policy == TiePolicy::half_credit ? 0.5 * t.ties : 0.0);
  t.accuracy = percent(credit, t.total);
}

void add(Tally& t, Preference predicted, HumanChoice truth) {
  ++t.total;
  if (predicted == Preference::Tie) ++t.ties;
  else if ((predicted == Preference::A) == (truth == HumanChoice::A)) ++t.correct;
}

SubsetAccuracy empty_subset(std::string name) {
  SubsetAccuracy s;
  s.subset = std::move(name);
  for (auto type : kAllPairTypes) s.per_type[type] = Tally{};
  return s;
}

}  // namespace

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open");
  std::vector<Json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::parse_error& e) {
      throw LoadError(path.string() + ": line " + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
  }
  return out;
}

std::vector<PreferenceItem> load_preference_dataset(const std::filesystem::path& path) {
  return load_items<PreferenceItem>(path);
}

std::vector<RatingItem> load_rating_dataset(const std::filesystem::path& path) {
  return load_items<RatingItem>(path);
}

Preference reconstruct_preference(double score_a, double score_b) {
  if (score_a > score_b) return Preference::A;
  if (score_b > score_a) return Preference::B;
  return Preference::Tie;
}

std::string_view to_string(TiePolicy p) { return p == TiePolicy::zero_credit ? "zero" : "half"; }

TiePolicy parse_tie_policy(std::string_view s) {
  if (s == "zero" || s == "zero_credit") return TiePolicy::zero_credit;
  if (s == "half" || s == "half_credit") return TiePolicy::half_credit;
  throw DomainError("unknown tie policy '" + std::string(s) + "'");
}

AccuracyReport pairwise_accuracy(std::span<const PreferenceItem> items, const PairScoreMap& scores,
                                 TiePolicy tie_policy) {
  if (items.empty()) throw EvaluationError("pairwise_accuracy: no items");

  std::vector<std::string> missing;
  for (const auto& item : items) {
    if (!scores.contains(item.key())) missing.push_back(item.key());
  }
  if (!missing.empty()) {
    std::string msg = "missing scores for " + std::to_string(missing.size()) + " item(s):";
    for (const auto& k : missing) msg += " " + k;
    throw EvaluationError(msg);
  }

  AccuracyReport report;
  report.overall = empty_subset("overall");
  for (const auto& item : items) {
    const PairScores& s = scores.at(item.key());
    if (!std::isfinite(s.a) || !std::isfinite(s.b))
      throw EvaluationError("non-finite score for item " + item.key());
    auto it = std::find_if(report.subsets.begin(), report.subsets.end(),
                           [&](const SubsetAccuracy& sa) { return sa.subset == item.subset; });
    if (it == report.subsets.end()) {
      report.subsets.push_back(empty_subset(item.subset));
      it = std::prev(report.subsets.end());
    }
    const Preference predicted = reconstruct_preference(s.a, s.b);
    for (SubsetAccuracy* target : {&*it, &report.overall}) {
      add(target->per_type[item.pair_type], predicted, item.human_choice);
      add(target->total, predicted, item.human_choice);
    }
  }
  auto finalize = [tie_policy](SubsetAccuracy& target) {
    for (auto& [type, tally] : target.per_type) finish(tally, tie_policy);
    finish(target.total, tie_policy);
    target.total_accuracy = target.total.accuracy;
  };
  for (auto& subset : report.subsets) finalize(subset);
  finalize(report.overall);
  return report;
}

TieReport tie_report(std::string model_id, std::span<const OptionalPair> pairs) {
  TieReport r;
  r.model_id = std::move(model_id);
  for (const auto& [a, b] : pairs) {
    if (!a || !b) {
      ++r.excluded_count;
      continue;
    }
    ++r.pair_count;
    if (*a == *b) {
      ++r.tie_count;
      ++r.tie_value_histogram[*a + 0.0];  // fold -0 into 0
    }
  }
  r.tie_rate = r.pair_count > 0 ? static_cast<double>(r.tie_count) / r.pair_count : 0.0;
  return r;
}

TieReport tie_report(std::string model_id, std::span<const PreferenceItem> items,
                     const std::unordered_map<std::string, OptionalPair>& scores) {
  std::vector<OptionalPair> pairs;
  pairs.reserve(items.size());
  for (const auto& item : items) {
    auto it = scores.find(item.key());
    pairs.push_back(it == scores.end() ? OptionalPair{} : it->second);
  }
  return tie_report(std::move(model_id), pairs);
}

BundleIndex::BundleIndex(std::span<const ScoreBundle> bundles) {
  for (const auto& b : bundles) index_[{b.audio_id, b.caption_id}] = &b;
}

const ScoreBundle* BundleIndex::find(const std::string& audio_id, const std::string& caption_id) const {
  auto it = index_.find({audio_id, caption_id});
  return it == index_.end() ? nullptr : it->second;
}

PairScoreMap pair_scores(std::span<const PreferenceItem> items, const BundleIndex& bundles,
                         const BundleMetric& metric) {
  PairScoreMap out;
  for (const auto& item : items) {
    const ScoreBundle* a = bundles.find(item.audio.id, item.caption_a.id);
    const ScoreBundle* b = bundles.find(item.audio.id, item.caption_b.id);
    if (!a || !b) continue;
    auto sa = metric(*a);
    auto sb = metric(*b);
    if (sa && sb) out[item.key()] = PairScores{*sa, *sb};
  }
  return out;
}

SweepResult alpha_sweep(std::span<const ScoreBundle> bundles, std::span<const PreferenceItem> items,
                        std::span<const double> grid, TiePolicy tie_policy) {
  if (grid.empty()) throw DomainError("alpha_sweep: empty grid");
  const BundleIndex index(bundles);
  SweepResult result;
  for (double alpha : grid) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha_sweep: alpha outside [0, 1]");
    auto scores = pair_scores(items, index, [alpha](const ScoreBundle& b) -> std::optional<double> {
      auto s = b.s_clap();
      if (!s || !b.fleur) return std::nullopt;
      return caf_score(*s, *b.fleur, alpha);
    });
    const double acc = pairwise_accuracy(items, scores, tie_policy).overall.total_accuracy;
    result.points.push_back(SweepPoint{alpha, acc});
    // Ties for best keep the first grid value.
    if (result.points.size() == 1 || acc > result.best_accuracy) {
      result.best_alpha = alpha;
      result.best_accuracy = acc;
    }
  }
  const bool have_entropy = std::all_of(bundles.begin(), bundles.end(),
                                        [](const ScoreBundle& b) { return b.entropy.has_value(); });
  if (have_entropy && !bundles.empty()) {
    const AlphaPolicy adaptive = AlphaPolicy::adaptive();
    auto scores = pair_scores(items, index, [&](const ScoreBundle& b) -> std::optional<double> {
      auto s = b.s_clap();
      if (!s || !b.fleur) return std::nullopt;
      return caf_score(*s, *b.fleur, resolve_alpha(adaptive, b.entropy));
    });
    result.adaptive_accuracy = pairwise_accuracy(items, scores, tie_policy).overall.total_accuracy;
  }
  return result;
}

std::vector<PoolingRow> pooling_ablation(std::span<const ScoreBundle> bundles,
                                         std::span<const PreferenceItem> items, double alpha,
                                         TiePolicy tie_policy) {
  const BundleIndex index(bundles);
  std::vector<PoolingRow> rows;
  for (auto strategy : kAllPoolingStrategies) {
    auto scores = pair_scores(items, index, [&](const ScoreBundle& b) -> std::optional<double> {
      auto it = b.s_clap_by_strategy.find(strategy);
      if (it == b.s_clap_by_strategy.end() || !b.fleur) return std::nullopt;
      return caf_score(it->second, *b.fleur, alpha);
    });
    rows.push_back(PoolingRow{strategy, pairwise_accuracy(items, scores, tie_policy)});
  }
  return rows;
}

}  // namespace cafscore
