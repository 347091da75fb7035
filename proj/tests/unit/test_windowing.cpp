// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "cafscore/errors.hpp"
#include "cafscore/windowing.hpp"
#include "oracles.hpp"
#include "random.hpp"

using namespace cafscore;

namespace {

EmbeddingRecord emb(std::vector<double> v, std::string model = "m") {
  const auto dim = v.size();
  return {CaptionSubject{"c", ""}, std::move(model), dim, std::move(v), Json::object()};
}

}  // namespace

TEST_SUITE("windowing") {
  TEST_CASE("window generation") {
    const WindowingConfig cfg{10.0, 1.0};
    auto w = generate_windows(12.0, cfg);
    REQUIRE(w.size() == 3);
    CHECK(w[0] == WindowSpec{0.0, 10.0});
    CHECK(w[2] == WindowSpec{2.0, 10.0});
    CHECK(generate_windows(10.0, cfg).size() == 1);
    auto fallback = generate_windows(5.0, cfg);
    REQUIRE(fallback.size() == 1);
    CHECK(fallback[0] == WindowSpec{0.0, 5.0});
    CHECK(generate_windows(30.0, {7.0, 2.5}).size() == 10);
    CHECK_THROWS_AS(generate_windows(0.0, cfg), DomainError);
    CHECK_THROWS_AS(generate_windows(5.0, {10.0, 0.0}), DomainError);
    CHECK_THROWS_AS(generate_windows(5.0, {-1.0, 1.0}), DomainError);
  }

  TEST_CASE("window counts match a stepping oracle on grid-valued inputs") {
    gen::Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      const double window = rng.integer(1, 20) * 0.5;
      const double hop = rng.integer(1, 8) * 0.25;
      const double duration = rng.integer(1, 120) * 0.5;
      const auto w = generate_windows(duration, {window, hop});
      CHECK(w.size() == oracle::window_count(duration, window, hop));
      for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(w[k].end_s() <= duration + 1e-12);
        if (k > 0) CHECK(w[k].start_s > w[k - 1].start_s);
      }
    }
  }

  TEST_CASE("default windowing by model family") {
    CHECK(default_windowing_for("msclap-2023").window_len_s == 7.0);
    CHECK(default_windowing_for("Microsoft-CLAP 2022").window_len_s == 7.0);
    CHECK(default_windowing_for("ms_clap").window_len_s == 7.0);
    CHECK(default_windowing_for("laion-clap").window_len_s == 10.0);
    CHECK(default_windowing_for("m2d-clap").window_len_s == 10.0);
    CHECK(default_windowing_for("laion-clap").hop_s == 1.0);
  }

  TEST_CASE("truncated window") {
    CHECK(truncated_window(12.0, {10.0, 1.0}) == WindowSpec{0.0, 10.0});
    CHECK(truncated_window(4.0, {10.0, 1.0}) == WindowSpec{0.0, 4.0});
  }

  TEST_CASE("cosine similarity") {
    const std::vector<double> a{1.0, 0.0}, b{0.0, 2.0}, c{3.0, 0.0}, d{-1.0, 0.0};
    CHECK(cosine_similarity(a, b) == doctest::Approx(0.0));
    CHECK(cosine_similarity(a, c) == 1.0);
    CHECK(cosine_similarity(a, d) == -1.0);
    const std::vector<double> e{0.6, 0.8};
    CHECK(cosine_similarity(a, e) == doctest::Approx(0.6).epsilon(1e-15));
    const std::vector<double> zero{0.0, 0.0}, three{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(cosine_similarity(a, zero), DomainError);
    CHECK_THROWS_AS(cosine_similarity(a, three), DomainError);

    gen::Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      auto x = rng.values(6), y = rng.values(6);
      x[0] += 2.0;
      const double s = cosine_similarity(x, y);
      CHECK(s >= -1.0);
      CHECK(s <= 1.0);
      CHECK(cosine_similarity(x, x) == doctest::Approx(1.0));
    }
  }

  TEST_CASE("clap score checks model ids") {
    CHECK(clap_score(emb({1, 0}), emb({1, 1})) == doctest::Approx(std::sqrt(0.5)));
    CHECK_THROWS_AS(clap_score(emb({1, 0}, "a"), emb({1, 0}, "b")), DomainError);
  }

  TEST_CASE("pooling") {
    const std::vector<double> s{0.2, 0.8, 0.5};
    CHECK(pool(s, PoolingStrategy::max) == 0.8);
    CHECK(pool(s, PoolingStrategy::avg) == doctest::Approx(0.5));
    CHECK_THROWS_AS(pool(s, PoolingStrategy::none), DomainError);
    const std::vector<double> one{0.3};
    for (auto strategy : kAllPoolingStrategies) CHECK(pool(one, strategy) == 0.3);
    CHECK_THROWS_AS(pool(std::vector<double>{}, PoolingStrategy::max), DomainError);
  }

  TEST_CASE("pooling order property") {
    gen::Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
      const auto v = rng.values(static_cast<std::size_t>(rng.integer(1, 12)));
      const double mx = pool(v, PoolingStrategy::max);
      const double avg = pool(v, PoolingStrategy::avg);
      const double mn = *std::min_element(v.begin(), v.end());
      CHECK(mx >= avg);
      CHECK(avg >= mn);
    }
  }

  TEST_CASE("s-clap over windows") {
    const auto text = emb({1.0, 0.0});
    const std::vector<EmbeddingRecord> windows{emb({0.6, 0.8}), emb({0.8, 0.6}), emb({0.0, 1.0})};
    CHECK(s_clap_score(text, windows, PoolingStrategy::max) == doctest::Approx(0.8));
    CHECK(s_clap_score(text, windows, PoolingStrategy::avg) == doctest::Approx(1.4 / 3.0));
    const std::vector<EmbeddingRecord> single{emb({0.6, 0.8})};
    for (auto strategy : kAllPoolingStrategies)
      CHECK(s_clap_score(text, single, strategy) == doctest::Approx(0.6));
    CHECK_THROWS_AS(s_clap_score(text, std::vector<EmbeddingRecord>{}, PoolingStrategy::max), DomainError);
  }
}
