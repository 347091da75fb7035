// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace cafscore {

using Json = nlohmann::json;

struct AudioClipRef {
  std::string id;
  double duration_s = 0.0;
  std::string source;

  Json extra = Json::object();
};

enum class CaptionOrigin { human, machine, unknown };

struct CaptionCandidate {
  std::string id;
  std::string text;
  CaptionOrigin origin = CaptionOrigin::unknown;

  Json extra = Json::object();
};

/// Half-open time interval [start_s, start_s + len_s) over a clip.
struct WindowSpec {
  double start_s = 0.0;
  double len_s = 0.0;

  double end_s() const { return start_s + len_s; }
  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

struct AudioWindowSubject {
  std::string audio_id;
  WindowSpec window;
  friend bool operator==(const AudioWindowSubject&, const AudioWindowSubject&) = default;
};

struct CaptionSubject {
  std::string caption_id;
  /// Carried to HTTP backends so they can encode it; file backends key on the id only.
  std::string text;
  friend bool operator==(const CaptionSubject&, const CaptionSubject&) = default;
};

using EmbeddingSubject = std::variant<AudioWindowSubject, CaptionSubject>;

struct EmbeddingRecord {
  EmbeddingSubject subject;
  std::string model_id;
  std::size_t dim = 0;
  std::vector<double> vector;

  Json extra = Json::object();
};

/// Probability per digit 0..9 at one decimal place. Absent digits carry no mass.
using DigitMap = std::map<int, double>;

struct DigitDistribution {
  std::array<DigitMap, 2> places;
  std::string greedy_text;
  std::string model_id;

  Json extra = Json::object();
};

struct TokenStep {
  std::string chosen_token_text;
  std::map<std::string, double> top_logprobs;
};

struct GenerationTrace {
  std::string model_id;
  std::string prompt_hash;
  std::string greedy_text;
  std::vector<TokenStep> token_steps;

  Json extra = Json::object();
};

enum class PoolingStrategy { none, avg, max };

struct ScoreBundle {
  std::string audio_id;
  std::string caption_id;
  std::string clap_model_id;
  std::string lalm_model_id;
  std::map<PoolingStrategy, double> s_clap_by_strategy;
  /// Strategy whose S-CLAP value feeds the fusion.
  PoolingStrategy pooling = PoolingStrategy::max;
  std::optional<double> fleur;
  std::optional<double> raw;
  std::optional<double> entropy;
  std::map<double, double> caf_by_alpha;

  Json extra = Json::object();

  std::optional<double> s_clap() const;
};

enum class HumanChoice { A, B };
enum class PairType { HH, HM, MM };

struct PreferenceItem {
  AudioClipRef audio;
  CaptionCandidate caption_a;
  CaptionCandidate caption_b;
  HumanChoice human_choice = HumanChoice::A;
  PairType pair_type = PairType::HH;
  std::string subset;

  Json extra = Json::object();

  /// Stable identifier "audio/caption_a/caption_b" used to key per-item scores.
  std::string key() const;
};

struct RatingItem {
  AudioClipRef audio;
  CaptionCandidate caption;
  double human_rating = 0.0;

  Json extra = Json::object();

  std::string key() const;
};

// Enum <-> wire string. Parsers throw DomainError on unknown names.
std::string_view to_string(CaptionOrigin v);
std::string_view to_string(PoolingStrategy v);
std::string_view to_string(HumanChoice v);
std::string_view to_string(PairType v);
CaptionOrigin parse_caption_origin(std::string_view s);
PoolingStrategy parse_pooling(std::string_view s);
HumanChoice parse_human_choice(std::string_view s);
PairType parse_pair_type(std::string_view s);

inline constexpr std::array<PairType, 3> kAllPairTypes{PairType::HH, PairType::HM, PairType::MM};
inline constexpr std::array<PoolingStrategy, 3> kAllPoolingStrategies{
    PoolingStrategy::none, PoolingStrategy::avg, PoolingStrategy::max};

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

}  // namespace cafscore
