// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include "cafscore/errors.hpp"
#include "cafscore/fusion.hpp"
#include "cafscore/harness.hpp"
#include "fakes.hpp"
#include "random.hpp"

using namespace cafscore;

namespace {

PreferenceItem item(const std::string& audio, const std::string& a, const std::string& b, HumanChoice choice,
                    PairType type, const std::string& subset) {
  PreferenceItem p;
  p.audio = {audio, 10.0, "test", Json::object()};
  p.caption_a = {a, "caption " + a, CaptionOrigin::human, Json::object()};
  p.caption_b = {b, "caption " + b, CaptionOrigin::machine, Json::object()};
  p.human_choice = choice;
  p.pair_type = type;
  p.subset = subset;
  return p;
}

ScoreBundle bundle(const std::string& audio, const std::string& caption, double s_max, double s_avg, double s_none,
                   double fleur, std::optional<double> entropy = std::nullopt) {
  ScoreBundle b;
  b.audio_id = audio;
  b.caption_id = caption;
  b.clap_model_id = "clap";
  b.lalm_model_id = "lalm";
  b.s_clap_by_strategy = {{PoolingStrategy::max, s_max}, {PoolingStrategy::avg, s_avg}, {PoolingStrategy::none, s_none}};
  b.fleur = fleur;
  b.entropy = entropy;
  return b;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("preference reconstruction") {
    CHECK(reconstruct_preference(0.6, 0.4) == Preference::A);
    CHECK(reconstruct_preference(0.4, 0.6) == Preference::B);
    CHECK(reconstruct_preference(0.5, 0.5) == Preference::Tie);
  }

  TEST_CASE("tie policy names") {
    CHECK(parse_tie_policy("zero") == TiePolicy::zero_credit);
    CHECK(parse_tie_policy("half") == TiePolicy::half_credit);
    CHECK(parse_tie_policy("half_credit") == TiePolicy::half_credit);
    CHECK(to_string(TiePolicy::half_credit) == "half");
    CHECK_THROWS_AS(parse_tie_policy("third"), DomainError);
  }

  TEST_CASE("pairwise accuracy by subset and pair type") {
    const std::vector<PreferenceItem> items{
        item("x", "1", "2", HumanChoice::A, PairType::HH, "Main"),
        item("x", "1", "3", HumanChoice::B, PairType::HM, "Main"),
        item("y", "4", "5", HumanChoice::A, PairType::MM, "Hall"),
        item("y", "4", "6", HumanChoice::B, PairType::MM, "Hall"),
    };
    PairScoreMap scores{{items[0].key(), {0.9, 0.1}},
                        {items[1].key(), {0.9, 0.1}},
                        {items[2].key(), {0.5, 0.5}},
                        {items[3].key(), {0.2, 0.3}}};
    const auto zero = pairwise_accuracy(items, scores, TiePolicy::zero_credit);
    REQUIRE(zero.subsets.size() == 2);
    CHECK(zero.subsets[0].subset == "Main");
    CHECK(zero.subsets[1].subset == "Hall");
    CHECK(zero.subsets[0].total.accuracy == 50.0);
    CHECK(zero.subsets[0].per_type.at(PairType::HH).accuracy == 100.0);
    CHECK(zero.subsets[0].per_type.at(PairType::HM).accuracy == 0.0);
    CHECK(zero.subsets[1].total.ties == 1);
    CHECK(zero.subsets[1].total.accuracy == 50.0);
    CHECK(zero.overall.total.total == 4);
    CHECK(zero.overall.total.accuracy == 50.0);
    const auto half = pairwise_accuracy(items, scores, TiePolicy::half_credit);
    CHECK(half.subsets[1].total.accuracy == 75.0);
    CHECK(half.overall.total.accuracy == 62.5);

    PairScoreMap missing = scores;
    missing.erase(items[3].key());
    CHECK_THROWS_AS(pairwise_accuracy(items, missing, TiePolicy::zero_credit), EvaluationError);
    CHECK_THROWS_AS(pairwise_accuracy(std::vector<PreferenceItem>{}, scores, TiePolicy::zero_credit),
                    EvaluationError);
  }

  TEST_CASE("accuracy is invariant under increasing affine maps") {
    gen::Rng rng(31);
    std::vector<PreferenceItem> items;
    PairScoreMap scores, mapped;
    for (int i = 0; i < 300; ++i) {
      auto p = gen::pref_item(rng);
      p.audio.id = "clip" + std::to_string(i);
      items.push_back(p);
      const double a = rng.coin(0.2) ? 0.5 : rng.uniform(0.0, 1.0);
      const double b = rng.coin(0.2) ? a : rng.uniform(0.0, 1.0);
      scores[p.key()] = {a, b};
      mapped[p.key()] = {2.0 * a + 3.0, 2.0 * b + 3.0};
    }
    for (auto policy : {TiePolicy::zero_credit, TiePolicy::half_credit}) {
      const auto x = pairwise_accuracy(items, scores, policy);
      const auto y = pairwise_accuracy(items, mapped, policy);
      CHECK(x.overall.total.accuracy == y.overall.total.accuracy);
      CHECK(x.overall.total.ties == y.overall.total.ties);
    }
  }

  TEST_CASE("tie report") {
    const std::vector<OptionalPair> pairs{{0.8, 0.8}, {0.8, 0.7}, {0.9, 0.9}, {std::nullopt, 0.5}, {0.8, 0.8}};
    const auto r = tie_report("m", pairs);
    CHECK(r.tie_count == 3);
    CHECK(r.pair_count == 4);
    CHECK(r.excluded_count == 1);
    CHECK(r.tie_rate == 0.75);
    CHECK(r.tie_value_histogram.at(0.8) == 2);
    CHECK(r.tie_value_histogram.at(0.9) == 1);
    CHECK(tie_report("m", std::vector<OptionalPair>{}).tie_rate == 0.0);
    CHECK(tie_report("m", std::vector<OptionalPair>{{0.1, 0.2}}).tie_rate == 0.0);
  }

  TEST_CASE("alpha sweep and pooling ablation") {
    const std::vector<PreferenceItem> items{
        item("x", "1", "2", HumanChoice::A, PairType::HH, "Main"),
        item("x", "3", "4", HumanChoice::A, PairType::HH, "Main"),
    };
    // Item 1: CLAP prefers A, FLEUR prefers B. Item 2: CLAP prefers B, FLEUR prefers A strongly.
    const std::vector<ScoreBundle> bundles{
        bundle("x", "1", 0.6, 0.1, 0.5, 0.3, 0.2), bundle("x", "2", 0.5, 0.2, 0.6, 0.45, 0.2),
        bundle("x", "3", 0.4, 0.4, 0.4, 0.9, 0.2), bundle("x", "4", 0.5, 0.5, 0.5, 0.1, 0.2)};
    const auto sweep = alpha_sweep(bundles, items, default_alpha_grid(), TiePolicy::zero_credit);
    REQUIRE(sweep.points.size() == 5);
    CHECK(sweep.points.front().overall_accuracy == 50.0);  // FLEUR alone
    CHECK(sweep.points.back().overall_accuracy == 50.0);   // CLAP alone
    CHECK(sweep.points[3].overall_accuracy == 100.0);      // 0.8
    CHECK(sweep.best_alpha == 0.8);
    CHECK(sweep.best_accuracy == 100.0);
    REQUIRE(sweep.adaptive_accuracy.has_value());
    CHECK(*sweep.adaptive_accuracy == sweep.points[1].overall_accuracy);

    auto no_entropy = bundles;
    no_entropy[0].entropy.reset();
    CHECK_FALSE(alpha_sweep(no_entropy, items, default_alpha_grid(), TiePolicy::zero_credit).adaptive_accuracy);
    CHECK_THROWS_AS(alpha_sweep(bundles, items, std::vector<double>{}, TiePolicy::zero_credit), DomainError);

    const auto rows = pooling_ablation(bundles, items, 1.0, TiePolicy::zero_credit);
    REQUIRE(rows.size() == 3);
    std::map<PoolingStrategy, double> acc;
    for (const auto& r : rows) acc[r.strategy] = r.report.overall.total.accuracy;
    CHECK(acc[PoolingStrategy::max] == 50.0);
    CHECK(acc[PoolingStrategy::avg] == 0.0);
    CHECK(acc[PoolingStrategy::none] == 0.0);
  }

  TEST_CASE("dataset loading") {
    fake::TempDir dir;
    gen::Rng rng(41);
    const auto p = gen::pref_item(rng);
    {
      std::ofstream out(dir / "pref.jsonl");
      out << encode_record_line(p) << "\n\n";
    }
    const auto items = load_preference_dataset(dir / "pref.jsonl");
    REQUIRE(items.size() == 1);
    CHECK(to_json(items[0]) == to_json(p));
    {
      std::ofstream out(dir / "bad.jsonl");
      out << encode_record_line(p) << "\n{\"kind\":\"pref_item\"}\n";
    }
    try {
      load_preference_dataset(dir / "bad.jsonl");
      FAIL("expected LoadError");
    } catch (const LoadError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    {
      std::ofstream out(dir / "rating.jsonl");
      out << encode_record_line(gen::rating_item(rng)) << "\n";
    }
    CHECK(load_rating_dataset(dir / "rating.jsonl").size() == 1);
    CHECK_THROWS_AS(load_rating_dataset(dir / "pref.jsonl"), LoadError);
    CHECK_THROWS_AS(load_preference_dataset(dir / "missing.jsonl"), LoadError);
  }
}
