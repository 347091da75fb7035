// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "cafscore/errors.hpp"
#include "cafscore/fleur.hpp"
#include "cafscore/prompt_assets.hpp"
#include "oracles.hpp"
#include "random.hpp"

using namespace cafscore;

namespace {

GenerationTrace trace_of(std::vector<TokenStep> steps) {
  GenerationTrace t;
  t.model_id = "lalm";
  t.prompt_hash = "h";
  for (const auto& s : steps) t.greedy_text += s.chosen_token_text;
  t.token_steps = std::move(steps);
  return t;
}

DigitDistribution dist_of(DigitMap first, DigitMap second) {
  DigitDistribution d;
  d.places = {std::move(first), std::move(second)};
  return d;
}

}  // namespace

TEST_SUITE("fleur") {
  TEST_CASE("weighted digit score on a two-place distribution") {
    const auto d = dist_of({{8, 0.7}, {9, 0.3}}, {{5, 0.6}, {4, 0.4}});
    CHECK(std::abs(fleur_score(d) - 0.876) <= 1e-12);
    CHECK(std::abs(fleur_score(d) - oracle::fleur({d.places[0], d.places[1]})) <= 1e-12);
    CHECK(std::abs(fleur_score(dist_of({{8, 1.0}}, {{5, 1.0}})) - 0.85) <= 1e-12);
    CHECK(fleur_score(dist_of({}, {})) == 0.0);
  }

  TEST_CASE("score stays within [0, 0.99] and matches the oracle") {
    gen::Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      const auto d = dist_of(gen::digit_map(rng), gen::digit_map(rng));
      const double f = fleur_score(d);
      CHECK(f >= 0.0);
      CHECK(f <= 0.99 + 1e-12);
      CHECK(std::abs(f - oracle::fleur({d.places[0], d.places[1]})) <= 1e-12);
    }
  }

  TEST_CASE("extraction from single-character tokens") {
    const auto t = trace_of({{"0", {{"0", 0.0}}},
                             {".", {{".", 0.0}}},
                             {"8", {{"8", std::log(0.7)}, {"9", std::log(0.3)}}},
                             {"5", {{"5", std::log(0.6)}, {"4", std::log(0.4)}, {"<eos>", -5.0}}}});
    const auto d = extract_digit_distributions(t);
    CHECK(d.places[0].at(8) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(d.places[0].at(9) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(d.places[1].size() == 2);
    CHECK(std::abs(fleur_score(d) - 0.876) <= 1e-12);
    CHECK(d.greedy_text == "0.85");
    CHECK(d.model_id == "lalm");
  }

  TEST_CASE("extraction from multi-character tokens") {
    const auto t = trace_of({{"0", {{"0", 0.0}}}, {".85", {{".85", std::log(0.5)}, {".74", std::log(0.5)}}}});
    const auto d = extract_digit_distributions(t);
    CHECK(d.places[0].at(8) == doctest::Approx(0.5));
    CHECK(d.places[0].at(7) == doctest::Approx(0.5));
    CHECK(d.places[1].at(5) == doctest::Approx(0.5));
    CHECK(fleur_score(d) == doctest::Approx(0.795));
  }

  TEST_CASE("second place past the greedy text uses the next step") {
    auto t = trace_of({{"0", {{"0", 0.0}}}, {".", {{".", 0.0}}}, {"8", {{"8", 0.0}}}});
    t.token_steps.push_back({"\n", {{"\n", std::log(0.9)}, {"5", std::log(0.1)}}});
    const auto d = extract_digit_distributions(t);
    CHECK(d.places[1].at(5) == doctest::Approx(0.1));
    CHECK(fleur_score(d) == doctest::Approx(0.805));

    const auto short_trace = trace_of({{"0", {{"0", 0.0}}}, {".", {{".", 0.0}}}, {"8", {{"8", 0.0}}}});
    CHECK(extract_digit_distributions(short_trace).places[1].empty());
  }

  TEST_CASE("decimal point must follow a digit") {
    const auto t = trace_of({{"Rating", {{"Rating", 0.0}}},
                             {". ", {{". ", 0.0}}},
                             {"0", {{"0", 0.0}}},
                             {".", {{".", 0.0}}},
                             {"6", {{"6", 0.0}}}});
    const auto d = extract_digit_distributions(t);
    CHECK(d.places[0].at(6) == 1.0);
  }

  TEST_CASE("extraction failures") {
    const auto none = trace_of({{"1", {{"1", 0.0}}}});
    try {
      extract_digit_distributions(none);
      FAIL("expected an ExtractionError");
    } catch (const ExtractionError& e) {
      CHECK(e.code() == ExtractionError::Code::no_decimal_point);
    }
    GenerationTrace empty;
    empty.greedy_text = "0.5";
    try {
      extract_digit_distributions(empty);
      FAIL("expected an ExtractionError");
    } catch (const ExtractionError& e) {
      CHECK(e.code() == ExtractionError::Code::empty_trace);
    }
  }

  TEST_CASE("per-place mass is capped at one") {
    const auto t = trace_of({{"0", {{"0", 0.0}}}, {".", {{".", 0.0}}}, {"8", {{"8", std::log(0.8)}, {"8 ", std::log(0.8)}}}});
    const auto d = extract_digit_distributions(t);
    double mass = 0.0;
    for (const auto& [k, p] : d.places[0]) mass += p;
    CHECK(mass <= 1.0 + 1e-12);
    CHECK(d.places[0].at(8) == doctest::Approx(1.0));
  }

  TEST_CASE("raw score parsing") {
    CHECK(parse_raw_score("0.85").value == 0.85);
    CHECK(parse_raw_score("Score: 0.7").value == 0.7);
    CHECK(parse_raw_score("1").value == 1.0);
    CHECK(parse_raw_score("1.0").value == 1.0);
    CHECK(parse_raw_score("maybe 0.3, final 0.4").value == 0.4);
    CHECK(parse_raw_score(".5").value == 0.5);
    CHECK_FALSE(parse_raw_score("-0.5").parsed());
    CHECK_FALSE(parse_raw_score("2.5").parsed());
    CHECK_FALSE(parse_raw_score("no idea").parsed());
    CHECK_FALSE(parse_raw_score("").parsed());
  }

  TEST_CASE("entropy modes") {
    const auto d = dist_of({{8, 0.7}, {9, 0.3}}, {{5, 1.0}});
    CHECK(std::abs(distribution_entropy(d) - 0.2652949955741215) <= 1e-12);
    CHECK(distribution_entropy(d, EntropyMode::unnormalized) ==
          doctest::Approx(-(0.7 * std::log(0.7) + 0.3 * std::log(0.3))));
    CHECK(distribution_entropy(d, EntropyMode::both_places) == doctest::Approx(0.2652949955741215 / 2.0));
    CHECK(distribution_entropy(dist_of({{8, 1.0}}, {})) == 0.0);
    CHECK(distribution_entropy(dist_of({}, {})) == 1.0);
    CHECK(distribution_entropy(dist_of({}, {}), EntropyMode::unnormalized) == doctest::Approx(std::log(10.0)));
    // Renormalization: a partial mass spread evenly is still maximal for its support.
    CHECK(distribution_entropy(dist_of({{1, 0.1}, {2, 0.1}}, {})) == doctest::Approx(std::log(2.0) / std::log(10.0)));
    DigitMap uniform;
    for (int k = 0; k < 10; ++k) uniform[k] = 0.1;
    CHECK(distribution_entropy(dist_of(uniform, {})) == doctest::Approx(1.0));
  }

  TEST_CASE("prompts") {
    const auto p = build_caption_prompt("A dog barks");
    std::string expected(assets::kPromptCaptionV1);
    expected.replace(expected.find("{pred_caption}"), 14, "A dog barks");
    CHECK(p == expected);
    CHECK(p.find("Caption: A dog barks\n") != std::string::npos);
    CHECK(p.find("(Print Real Number Score ONLY)") != std::string::npos);
    CHECK(p.ends_with("Score(Choose a rating from 0.0 to 1.0):"));
    const auto tta = build_tta_prompt("Rain on a roof");
    CHECK(tta.find("rate the audio") != std::string::npos);
    CHECK(tta.find("Caption: Rain on a roof") != std::string::npos);
    CHECK(build_prompt(PromptKind::tta, "x") == build_tta_prompt("x"));
    CHECK_THROWS_AS(build_caption_prompt("   "), DomainError);
    CHECK_THROWS_AS(build_tta_prompt(""), DomainError);
    CHECK(parse_prompt_kind("tta") == PromptKind::tta);
    CHECK_THROWS_AS(parse_prompt_kind("other"), DomainError);
  }
}
