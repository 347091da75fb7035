// SPDX-License-Identifier: Apache-2.0
#include "cafscore/types.hpp"

#include <charconv>
#include <cmath>

#include "cafscore/errors.hpp"

namespace cafscore {

std::optional<double> ScoreBundle::s_clap() const {
  auto it = s_clap_by_strategy.find(pooling);
  if (it == s_clap_by_strategy.end()) return std::nullopt;
  return it->second;
}

std::string PreferenceItem::key() const {
  return audio.id + "/" + caption_a.id + "/" + caption_b.id;
}

std::string RatingItem::key() const { return audio.id + "/" + caption.id; }

std::string_view to_string(CaptionOrigin v) {
  switch (v) {
    case CaptionOrigin::human: return "human";
    case CaptionOrigin::machine: return "machine";
    case CaptionOrigin::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(PoolingStrategy v) {
  switch (v) {
    case PoolingStrategy::none: return "none";
    case PoolingStrategy::avg: return "avg";
    case PoolingStrategy::max: return "max";
  }
  return "max";
}

std::string_view to_string(HumanChoice v) { return v == HumanChoice::A ? "A" : "B"; }

std::string_view to_string(PairType v) {
  switch (v) {
    case PairType::HH: return "HH";
    case PairType::HM: return "HM";
    case PairType::MM: return "MM";
  }
  return "HH";
}

CaptionOrigin parse_caption_origin(std::string_view s) {
  if (s == "human") return CaptionOrigin::human;
  if (s == "machine") return CaptionOrigin::machine;
  if (s == "unknown") return CaptionOrigin::unknown;
  throw DomainError("unknown caption origin '" + std::string(s) + "'");
}

PoolingStrategy parse_pooling(std::string_view s) {
  if (s == "none") return PoolingStrategy::none;
  if (s == "avg") return PoolingStrategy::avg;
  if (s == "max") return PoolingStrategy::max;
  throw DomainError("unknown pooling strategy '" + std::string(s) + "'");
}

HumanChoice parse_human_choice(std::string_view s) {
  if (s == "A") return HumanChoice::A;
  if (s == "B") return HumanChoice::B;
  throw DomainError("unknown human choice '" + std::string(s) + "'");
}

PairType parse_pair_type(std::string_view s) {
  if (s == "HH") return PairType::HH;
  if (s == "HM") return PairType::HM;
  if (s == "MM") return PairType::MM;
  throw DomainError("unknown pair type '" + std::string(s) + "'");
}

std::string format_double(double v) {
  if (!std::isfinite(v)) throw DomainError("cannot format non-finite value");
  if (v == 0.0) return "0";  // also folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DomainError("to_chars failed");
  return std::string(buf, end);
}

}  // namespace cafscore
