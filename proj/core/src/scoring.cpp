// SPDX-License-Identifier: Apache-2.0
#include "cafscore/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

constexpr double kFleurCeiling = 0.99;

template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    std::throw_with_nested(StageError(stage, e.what()));
  }
}

}  // namespace

ClapResult score_clap(const ClapModel& model, const AudioClipRef& audio, const CaptionCandidate& caption) {
  Fetcher& fetcher = *model.fetcher;
  const EmbeddingRecord text = fetcher.fetch_embedding(CaptionSubject{caption.id, caption.text});

  std::vector<EmbeddingRecord> windows;
  for (const auto& w : generate_windows(audio.duration_s, model.windowing))
    windows.push_back(fetcher.fetch_embedding(AudioWindowSubject{audio.id, w}));

  const WindowSpec trunc = truncated_window(audio.duration_s, model.windowing);
  const EmbeddingRecord whole = fetcher.fetch_embedding(AudioWindowSubject{audio.id, trunc});

  ClapResult r;
  r.by_strategy[PoolingStrategy::none] = s_clap_score(text, std::span(&whole, 1), PoolingStrategy::none);
  r.by_strategy[PoolingStrategy::avg] = s_clap_score(text, windows, PoolingStrategy::avg);
  r.by_strategy[PoolingStrategy::max] = s_clap_score(text, windows, PoolingStrategy::max);
  return r;
}

LalmResult score_lalm(const LalmModel& model, const AudioClipRef& audio, const CaptionCandidate& caption,
                      EntropyMode entropy_mode) {
  const std::string prompt = build_prompt(model.prompt, caption.text);
  const GenerationTrace trace = model.fetcher->fetch_trace(audio.id, prompt, /*want_logprobs=*/true);

  LalmResult r;
  r.raw = parse_raw_score(trace.greedy_text);
  try {
    r.dist = extract_digit_distributions(trace);
    r.fleur = fleur_score(*r.dist);
    r.entropy = distribution_entropy(*r.dist, entropy_mode);
  } catch (const ExtractionError&) {
    // Integer answers such as "1" carry no decimal places.
    if (!r.raw.parsed()) throw;
    r.fleur = std::min(*r.raw.value, kFleurCeiling);
    r.entropy = entropy_mode == EntropyMode::unnormalized ? std::log(10.0) : 1.0;
  }
  return r;
}

ScoreBundle make_bundle(const AudioClipRef& audio, const CaptionCandidate& caption, const ClapModel* clap,
                        const ClapResult* clap_result, const LalmModel* lalm, const LalmResult* lalm_result,
                        const ScoringOptions& options) {
  ScoreBundle b;
  b.audio_id = audio.id;
  b.caption_id = caption.id;
  b.pooling = options.pooling;
  if (clap && clap_result) {
    b.clap_model_id = clap->id;
    b.s_clap_by_strategy = clap_result->by_strategy;
  }
  if (lalm && lalm_result) {
    b.lalm_model_id = lalm->id;
    b.fleur = lalm_result->fleur;
    b.raw = lalm_result->raw.value;
    b.entropy = lalm_result->entropy;
  }
  const auto s = b.s_clap();
  if (s && b.fleur) {
    for (double alpha : options.alpha_grid) b.caf_by_alpha[alpha] = caf_score(*s, *b.fleur, alpha);
    if (options.fixed_alpha) b.caf_by_alpha[*options.fixed_alpha] = caf_score(*s, *b.fleur, *options.fixed_alpha);
  }
  return b;
}

Scorer::Scorer(std::vector<ClapModel> clap_models, std::vector<LalmModel> lalm_models, ScoringOptions options)
    : clap_(std::move(clap_models)), lalm_(std::move(lalm_models)), options_(std::move(options)) {
  if (clap_.empty() && lalm_.empty()) throw DomainError("Scorer needs at least one CLAP or LALM model");
  for (const auto& m : clap_) {
    if (!m.fetcher) throw DomainError("CLAP model '" + m.id + "' has no fetcher");
  }
  for (const auto& m : lalm_) {
    if (!m.fetcher) throw DomainError("LALM model '" + m.id + "' has no fetcher");
  }
  for (double a : options_.alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) throw DomainError("alpha grid value outside [0, 1]");
  }
}

std::vector<ScoreBundle> Scorer::score(const AudioClipRef& audio, const CaptionCandidate& caption) const {
  std::vector<ClapResult> clap_results;
  for (const auto& m : clap_)
    clap_results.push_back(in_stage("clap[" + m.id + "]", [&] { return score_clap(m, audio, caption); }));
  std::vector<LalmResult> lalm_results;
  for (const auto& m : lalm_)
    lalm_results.push_back(
        in_stage("lalm[" + m.id + "]", [&] { return score_lalm(m, audio, caption, options_.entropy_mode); }));

  std::vector<ScoreBundle> out;
  if (clap_.empty()) {
    for (std::size_t j = 0; j < lalm_.size(); ++j)
      out.push_back(make_bundle(audio, caption, nullptr, nullptr, &lalm_[j], &lalm_results[j], options_));
  } else if (lalm_.empty()) {
    for (std::size_t i = 0; i < clap_.size(); ++i)
      out.push_back(make_bundle(audio, caption, &clap_[i], &clap_results[i], nullptr, nullptr, options_));
  } else {
    for (std::size_t i = 0; i < clap_.size(); ++i)
      for (std::size_t j = 0; j < lalm_.size(); ++j)
        out.push_back(make_bundle(audio, caption, &clap_[i], &clap_results[i], &lalm_[j], &lalm_results[j], options_));
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace cafscore
