// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "cafscore/errors.hpp"
#include "cafscore/scoring.hpp"
#include "fakes.hpp"
#include "fixture.hpp"

using namespace cafscore;

namespace {

struct FixedTraceBackend : Backend {
  explicit FixedTraceBackend(std::vector<std::string> tokens) : tokens(std::move(tokens)) {}
  EmbeddingRecord embed(const EmbedRequest&) override { throw RecordAbsent("record_absent: no embeddings"); }
  GenerationTrace generate(const GenerateRequest& req) override {
    GenerationTrace t;
    t.model_id = req.model_id;
    t.prompt_hash = req.prompt_hash;
    for (const auto& tok : tokens) {
      t.greedy_text += tok;
      t.token_steps.push_back({tok, {{tok, 0.0}}});
    }
    return t;
  }
  std::vector<std::string> tokens;
};

struct Models {
  fake::TempDir dir;
  std::shared_ptr<Cache> cache = std::make_shared<Cache>(dir / "cache");

  ClapModel clap() {
    auto backend = std::make_shared<FileBackend>("laion-clap-fixture",
                                                 std::vector{fixture::data_dir() / "clap_embeddings.jsonl"});
    return {"laion-clap-fixture", {10.0, 1.0}, std::make_shared<Fetcher>("laion-clap-fixture", backend, cache, 2)};
  }
  LalmModel lalm() {
    auto backend = std::make_shared<FileBackend>("lalm-fixture", std::vector{fixture::data_dir() / "lalm_traces.jsonl"});
    return {"lalm-fixture", PromptKind::caption, std::make_shared<Fetcher>("lalm-fixture", backend, cache, 2)};
  }
  /// Distinct model ids keep the fakes from sharing cache entries.
  LalmModel fixed(std::vector<std::string> tokens) {
    std::string id = "fixed";
    for (const auto& t : tokens) id += "-" + t;
    return {id, PromptKind::caption,
            std::make_shared<Fetcher>(id, std::make_shared<FixedTraceBackend>(std::move(tokens)), cache, 1)};
  }
};

const AudioClipRef kA1{"a1", 12.0, "fixture", Json::object()};
const CaptionCandidate kC1{"c1", "A dog barks while cars pass by", CaptionOrigin::unknown, Json::object()};

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("s-clap for every pooling strategy") {
    Models m;
    const auto r = score_clap(m.clap(), kA1, kC1);
    CHECK(r.by_strategy.at(PoolingStrategy::max) == doctest::Approx(0.50).epsilon(1e-12));
    CHECK(r.by_strategy.at(PoolingStrategy::avg) == doctest::Approx(0.40).epsilon(1e-12));
    CHECK(r.by_strategy.at(PoolingStrategy::none) == doctest::Approx(0.30).epsilon(1e-12));
  }

  TEST_CASE("lalm scoring and integer fallback") {
    Models m;
    const auto r = score_lalm(m.lalm(), kA1, kC1, EntropyMode::normalized_first_place);
    CHECK(r.fleur == doctest::Approx(0.76).epsilon(1e-12));
    CHECK(r.raw.value == 0.8);
    const double h = -(0.6 * std::log(0.6) + 0.4 * std::log(0.4)) / std::log(10.0);
    CHECK(r.entropy == doctest::Approx(h));

    const auto one = score_lalm(m.fixed({"1"}), kA1, kC1, EntropyMode::normalized_first_place);
    CHECK(one.fleur == 0.99);
    CHECK(one.entropy == 1.0);
    CHECK_FALSE(one.dist.has_value());
    const auto zero = score_lalm(m.fixed({"0"}), kA1, kC1, EntropyMode::unnormalized);
    CHECK(zero.fleur == 0.0);
    CHECK(zero.entropy == doctest::Approx(std::log(10.0)));
    CHECK_THROWS_AS(score_lalm(m.fixed({"unsure"}), kA1, kC1, EntropyMode::normalized_first_place), ExtractionError);
  }

  TEST_CASE("bundles for partial and full configurations") {
    Models m;
    ScoringOptions opts;
    Scorer clap_only({m.clap()}, {}, opts);
    const auto b1 = clap_only.score(kA1, kC1);
    REQUIRE(b1.size() == 1);
    CHECK_FALSE(b1[0].fleur.has_value());
    CHECK(b1[0].caf_by_alpha.empty());
    CHECK(b1[0].lalm_model_id.empty());
    CHECK(validate(b1[0]).ok());

    opts.fixed_alpha = 0.3;
    Scorer both({m.clap()}, {m.lalm()}, opts);
    const auto b2 = both.score(kA1, kC1);
    REQUIRE(b2.size() == 1);
    CHECK(b2[0].caf_by_alpha.size() == 6);
    CHECK(b2[0].caf_by_alpha.at(1.0) == *b2[0].s_clap());
    CHECK(b2[0].caf_by_alpha.at(0.0) == *b2[0].fleur);
    CHECK(b2[0].caf_by_alpha.at(0.8) == doctest::Approx(0.552));
    CHECK(validate(b2[0]).ok());

    Scorer two_lalms({m.clap()}, {m.lalm(), m.fixed({"0", ".", "5"})}, opts);
    const auto b3 = two_lalms.score(kA1, kC1);
    REQUIRE(b3.size() == 2);
    CHECK(b3[0].lalm_model_id == "lalm-fixture");
    CHECK(b3[1].lalm_model_id == "fixed-0-.-5");
    CHECK_THROWS_AS(Scorer({}, {}, opts), DomainError);
  }

  TEST_CASE("failures name the stage and keep the cause") {
    Models m;
    Scorer scorer({m.clap()}, {}, ScoringOptions{});
    const AudioClipRef missing{"zz", 12.0, "", Json::object()};
    try {
      scorer.score(missing, kC1);
      FAIL("expected StageError");
    } catch (const StageError& e) {
      CHECK(e.stage() == "clap[laion-clap-fixture]");
      CHECK(std::string(e.what()).find("record_absent") != std::string::npos);
      CHECK_THROWS_AS(std::rethrow_if_nested(e), RecordAbsent);
    }
  }

  TEST_CASE("parallel_for") {
    std::vector<int> out(100, 0);
    parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
    try {
      parallel_for(50, 4, [](std::size_t i) {
        if (i == 7 || i == 30) throw std::runtime_error("boom " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "boom 7");
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("not called"); });
  }
}
