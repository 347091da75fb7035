// SPDX-License-Identifier: Apache-2.0
// Hand-rolled generators for property tests.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cafscore/fusion.hpp"
#include "cafscore/records.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))];
  }

  std::string ident(const std::string& prefix) { return prefix + std::to_string(integer(0, 99999)); }

  std::string text() {
    static const std::vector<std::string> words = {"a",     "dog",    "barks", "rain",  "on",
                                                   "metal", "crowd",  "\"q\"", "\xc3\xa9t\xc3\xa9",
                                                   "tab\t", "line\n", "\\"};
    std::string s = pick(words);
    const int n = integer(0, 6);
    for (int i = 0; i < n; ++i) s += " " + pick(words);
    return s;
  }

  /// Values drawn from a small grid so ties are frequent.
  std::vector<double> tied_values(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = integer(0, 3) * 0.25;
    return v;
  }

  std::vector<double> values(std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline cafscore::Json extra(Rng& r) {
  cafscore::Json j = cafscore::Json::object();
  if (r.coin(0.3)) j["x_note"] = r.text();
  if (r.coin(0.2)) j["x_nested"] = {{"k", r.integer(0, 9)}, {"list", {1, 2.5, "s"}}};
  return j;
}

inline cafscore::AudioClipRef audio(Rng& r) {
  return {r.ident("clip"), r.uniform(0.1, 30.0), r.coin() ? "AudioCaps" : "Clotho", extra(r)};
}

inline cafscore::CaptionCandidate caption(Rng& r, const std::string& id) {
  static const std::vector<cafscore::CaptionOrigin> origins = {
      cafscore::CaptionOrigin::human, cafscore::CaptionOrigin::machine, cafscore::CaptionOrigin::unknown};
  return {id, r.text(), r.pick(origins), extra(r)};
}

inline cafscore::DigitMap digit_map(Rng& r) {
  cafscore::DigitMap m;
  double left = r.coin(0.3) ? r.uniform(0.0, 1.0) : 1.0;
  const int n = r.integer(0, 4);
  for (int i = 0; i < n && left > 0.0; ++i) {
    const double p = (i == n - 1) ? left : r.uniform(0.0, left);
    m[r.integer(0, 9)] = p;
    left -= p;
  }
  return m;
}

inline cafscore::EmbeddingRecord embedding(Rng& r) {
  cafscore::EmbeddingRecord e;
  if (r.coin()) {
    e.subject = cafscore::AudioWindowSubject{r.ident("clip"), {r.integer(0, 20) * 0.5, r.uniform(0.1, 10.0)}};
  } else {
    e.subject = cafscore::CaptionSubject{r.ident("cap"), r.coin() ? r.text() : std::string()};
  }
  e.model_id = r.ident("clap-");
  e.dim = static_cast<std::size_t>(r.integer(1, 16));
  e.vector = r.values(e.dim);
  e.vector[0] = r.uniform(0.1, 1.0);
  e.extra = extra(r);
  return e;
}

inline cafscore::DigitDistribution digit_dist(Rng& r) {
  cafscore::DigitDistribution d;
  d.places = {digit_map(r), digit_map(r)};
  d.greedy_text = "0." + std::to_string(r.integer(0, 99));
  d.model_id = r.ident("lalm-");
  d.extra = extra(r);
  return d;
}

inline cafscore::GenerationTrace trace(Rng& r) {
  cafscore::GenerationTrace t;
  t.model_id = r.ident("lalm-");
  t.prompt_hash = std::string(64, "0123456789abcdef"[r.integer(0, 15)]);
  const int steps = r.integer(0, 5);
  for (int i = 0; i < steps; ++i) {
    cafscore::TokenStep s;
    s.chosen_token_text = std::to_string(r.integer(0, 9));
    s.top_logprobs[s.chosen_token_text] = r.uniform(-3.0, 0.0);
    const int alts = r.integer(0, 3);
    for (int k = 0; k < alts; ++k) s.top_logprobs[r.text()] = r.uniform(-20.0, 0.0);
    t.greedy_text += s.chosen_token_text;
    t.token_steps.push_back(std::move(s));
  }
  t.extra = extra(r);
  return t;
}

inline cafscore::ScoreBundle score_bundle(Rng& r) {
  cafscore::ScoreBundle b;
  b.audio_id = r.ident("clip");
  b.caption_id = r.ident("cap");
  b.clap_model_id = r.ident("clap-");
  b.lalm_model_id = r.coin(0.8) ? r.ident("lalm-") : std::string();
  for (auto s : cafscore::kAllPoolingStrategies) {
    if (r.coin(0.8)) b.s_clap_by_strategy[s] = r.uniform(-1.0, 1.0);
  }
  b.s_clap_by_strategy[cafscore::PoolingStrategy::max] = r.uniform(-1.0, 1.0);
  b.pooling = cafscore::PoolingStrategy::max;
  if (!b.lalm_model_id.empty()) {
    b.fleur = r.uniform(0.0, 0.99);
    if (r.coin(0.9)) b.raw = r.uniform(0.0, 1.0);
    b.entropy = r.uniform(0.0, 1.0);
    for (double a : cafscore::default_alpha_grid()) b.caf_by_alpha[a] = cafscore::caf_score(*b.s_clap(), *b.fleur, a);
    if (r.coin()) {
      const double a = r.uniform(0.0, 1.0);
      b.caf_by_alpha[a] = cafscore::caf_score(*b.s_clap(), *b.fleur, a);
    }
  }
  b.extra = extra(r);
  return b;
}

inline cafscore::PreferenceItem pref_item(Rng& r) {
  cafscore::PreferenceItem p;
  p.audio = audio(r);
  p.caption_a = caption(r, "a" + std::to_string(r.integer(0, 999)));
  p.caption_b = caption(r, "b" + std::to_string(r.integer(0, 999)));
  p.human_choice = r.coin() ? cafscore::HumanChoice::A : cafscore::HumanChoice::B;
  p.pair_type = cafscore::kAllPairTypes[static_cast<std::size_t>(r.integer(0, 2))];
  p.subset = r.coin() ? "AudioCaps-Main" : "Clotho-Hallucination";
  p.extra = extra(r);
  return p;
}

inline cafscore::RatingItem rating_item(Rng& r) {
  return {audio(r), caption(r, r.ident("cap")), r.uniform(0.0, 10.0), extra(r)};
}

/// Any of the six record kinds, cycling through them by index.
inline cafscore::Record record(Rng& r, std::size_t i) {
  switch (i % 6) {
    case 0: return embedding(r);
    case 1: return digit_dist(r);
    case 2: return trace(r);
    case 3: return score_bundle(r);
    case 4: return pref_item(r);
    default: return rating_item(r);
  }
}

}  // namespace gen
