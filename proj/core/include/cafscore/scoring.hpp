// SPDX-License-Identifier: Apache-2.0
//
// Scores one (audio, caption) pair with every configured CLAP and LALM model.
#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cafscore/backends.hpp"
#include "cafscore/fleur.hpp"
#include "cafscore/fusion.hpp"
#include "cafscore/windowing.hpp"

namespace cafscore {

/// Wraps (via std::throw_with_nested) the failure of one scoring stage.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ClapModel {
  std::string id;
  WindowingConfig windowing;
  std::shared_ptr<Fetcher> fetcher;
};

struct LalmModel {
  std::string id;
  PromptKind prompt = PromptKind::caption;
  std::shared_ptr<Fetcher> fetcher;
};

struct ScoringOptions {
  PoolingStrategy pooling = PoolingStrategy::max;
  std::optional<double> fixed_alpha = kDefaultAlpha;
  std::vector<double> alpha_grid = default_alpha_grid();
  EntropyMode entropy_mode = EntropyMode::normalized_first_place;
};

struct ClapResult {
  std::map<PoolingStrategy, double> by_strategy;
};

struct LalmResult {
  RawScore raw;
  std::optional<DigitDistribution> dist;
  double fleur = 0.0;
  double entropy = 1.0;
};

/// S-CLAP for all three pooling strategies.
ClapResult score_clap(const ClapModel& model, const AudioClipRef& audio,
                      const CaptionCandidate& caption);

/// FLEUR, raw score and entropy from one greedy generation. A generation
/// without a decimal point falls back to its raw score as FLEUR with maximal
/// entropy; one that is also unparseable throws.
LalmResult score_lalm(const LalmModel& model, const AudioClipRef& audio,
                      const CaptionCandidate& caption, EntropyMode entropy_mode);

ScoreBundle make_bundle(const AudioClipRef& audio, const CaptionCandidate& caption,
                        const ClapModel* clap, const ClapResult* clap_result,
                        const LalmModel* lalm, const LalmResult* lalm_result,
                        const ScoringOptions& options);

class Scorer {
 public:
  Scorer(std::vector<ClapModel> clap_models, std::vector<LalmModel> lalm_models,
         ScoringOptions options);

  /// One bundle per (clap, lalm) combination; a side with no models
  /// contributes an empty model id. Order: clap-major, lalm-minor.
  std::vector<ScoreBundle> score(const AudioClipRef& audio, const CaptionCandidate& caption) const;

  const std::vector<ClapModel>& clap_models() const { return clap_; }
  const std::vector<LalmModel>& lalm_models() const { return lalm_; }
  const ScoringOptions& options() const { return options_; }

 private:
  std::vector<ClapModel> clap_;
  std::vector<LalmModel> lalm_;
  ScoringOptions options_;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Results land at
/// index i. The first exception (by index) is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace cafscore
