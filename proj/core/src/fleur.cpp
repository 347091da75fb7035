// SPDX-License-Identifier: Apache-2.0
#include "cafscore/fleur.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "cafscore/errors.hpp"
#include "cafscore/prompt_assets.hpp"

namespace cafscore {
namespace {

constexpr double kLn10 = 2.302585092994045684;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string substitute(std::string_view tmpl, std::string_view placeholder, std::string_view value) {
  std::string out(tmpl);
  auto pos = out.find(placeholder);
  if (pos == std::string::npos) throw std::logic_error("prompt template lacks its placeholder");
  out.replace(pos, placeholder.size(), value);
  return out;
}

void require_caption(std::string_view caption) {
  if (std::all_of(caption.begin(), caption.end(), [](unsigned char c) { return std::isspace(c); }))
    throw DomainError("prompt: caption must be nonempty");
}

// Adds exp(logprob) of every alternative whose character at `offset` is a digit.
void accumulate_digits(const TokenStep& step, std::size_t offset, DigitMap& place) {
  for (const auto& [tok, lp] : step.top_logprobs) {
    if (offset < tok.size() && is_digit(tok[offset])) place[tok[offset] - '0'] += std::exp(lp);
  }
}

void cap_mass(DigitMap& place) {
  double mass = 0.0;
  for (const auto& [d, p] : place) mass += p;
  if (mass > 1.0) {
    for (auto& [d, p] : place) p /= mass;
  }
}

double place_entropy(const DigitMap& place) {
  double mass = 0.0;
  for (const auto& [d, p] : place) {
    if (d >= 0 && d <= 9) mass += p;
  }
  if (!(mass > 0.0)) return kLn10;
  double h = 0.0;
  for (const auto& [d, p] : place) {
    if (d < 0 || d > 9 || p <= 0.0) continue;
    const double q = p / mass;
    h -= q * std::log(q);
  }
  return std::clamp(h, 0.0, kLn10);
}

}  // namespace

std::string_view to_string(PromptKind k) { return k == PromptKind::caption ? "caption" : "tta"; }

PromptKind parse_prompt_kind(std::string_view s) {
  if (s == "caption") return PromptKind::caption;
  if (s == "tta") return PromptKind::tta;
  throw DomainError("unknown prompt kind '" + std::string(s) + "'");
}

std::string_view prompt_template(PromptKind kind) {
  return kind == PromptKind::caption ? assets::kPromptCaptionV1 : assets::kPromptTtaV1;
}

std::string build_caption_prompt(std::string_view caption) {
  require_caption(caption);
  return substitute(assets::kPromptCaptionV1, "{pred_caption}", caption);
}

std::string build_tta_prompt(std::string_view caption) {
  require_caption(caption);
  return substitute(assets::kPromptTtaV1, "{caption}", caption);
}

std::string build_prompt(PromptKind kind, std::string_view caption) {
  return kind == PromptKind::caption ? build_caption_prompt(caption) : build_tta_prompt(caption);
}

DigitDistribution extract_digit_distributions(const GenerationTrace& trace) {
  const std::string& text = trace.greedy_text;
  std::size_t dot = std::string::npos;
  for (std::size_t i = 1; i < text.size(); ++i) {
    if (text[i] == '.' && is_digit(text[i - 1])) {
      dot = i;
      break;
    }
  }
  if (dot == std::string::npos)
    throw ExtractionError(ExtractionError::Code::no_decimal_point,
                          "no decimal point in greedy text '" + text + "'");
  if (trace.token_steps.empty())
    throw ExtractionError(ExtractionError::Code::empty_trace, "trace has no token steps");

  // Character span [begin, end) of each chosen token in the concatenated output.
  std::vector<std::size_t> begin(trace.token_steps.size() + 1, 0);
  for (std::size_t s = 0; s < trace.token_steps.size(); ++s)
    begin[s + 1] = begin[s] + trace.token_steps[s].chosen_token_text.size();
  auto step_covering = [&](std::size_t offset) -> std::optional<std::size_t> {
    auto it = std::upper_bound(begin.begin(), begin.end(), offset);
    if (it == begin.begin() || it == begin.end()) return std::nullopt;
    return static_cast<std::size_t>(std::distance(begin.begin(), it) - 1);
  };

  DigitDistribution dist;
  dist.greedy_text = trace.greedy_text;
  dist.model_id = trace.model_id;

  // When the '.' itself is not covered there is no meaningful "next" step.
  std::size_t last = step_covering(dot).value_or(trace.token_steps.size());
  for (std::size_t j = 0; j < dist.places.size(); ++j) {
    const std::size_t offset = dot + 1 + j;
    std::optional<std::size_t> step;
    if (offset < text.size()) step = step_covering(offset);
    if (step) {
      accumulate_digits(trace.token_steps[*step], offset - begin[*step], dist.places[j]);
      last = *step;
    } else if (last + 1 < trace.token_steps.size()) {
      ++last;
      accumulate_digits(trace.token_steps[last], 0, dist.places[j]);
    }
    cap_mass(dist.places[j]);
  }
  return dist;
}

double fleur_score(const DigitDistribution& dist) {
  double weighted[2] = {0.0, 0.0};
  for (std::size_t j = 0; j < dist.places.size(); ++j) {
    for (const auto& [digit, p] : dist.places[j]) {
      if (digit >= 1 && digit <= 9) weighted[j] += digit * p;
    }
  }
  return weighted[0] / 10.0 + weighted[1] / 100.0;
}

RawScore parse_raw_score(std::string_view text) {
  RawScore result;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool starts_number =
        is_digit(text[i]) || (text[i] == '.' && i + 1 < text.size() && is_digit(text[i + 1]));
    if (!starts_number) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && is_digit(text[i])) ++i;
    if (i + 1 < text.size() && text[i] == '.' && is_digit(text[i + 1])) {
      ++i;
      while (i < text.size() && is_digit(text[i])) ++i;
    }
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data() + start, text.data() + i, v);
    const bool negative = start > 0 && text[start - 1] == '-';
    if (ec == std::errc{} && end == text.data() + i && !negative && v >= 0.0 && v <= 1.0) {
      result.value = v;
      result.status = RawScore::Status::parsed;
    }
  }
  return result;
}

std::string_view to_string(EntropyMode m) {
  switch (m) {
    case EntropyMode::normalized_first_place: return "normalized_first_place";
    case EntropyMode::unnormalized: return "unnormalized";
    case EntropyMode::both_places: return "both_places";
  }
  return "normalized_first_place";
}

EntropyMode parse_entropy_mode(std::string_view s) {
  if (s == "normalized_first_place") return EntropyMode::normalized_first_place;
  if (s == "unnormalized") return EntropyMode::unnormalized;
  if (s == "both_places") return EntropyMode::both_places;
  throw DomainError("unknown entropy mode '" + std::string(s) + "'");
}

double distribution_entropy(const DigitDistribution& dist, EntropyMode mode) {
  switch (mode) {
    case EntropyMode::normalized_first_place:
      return place_entropy(dist.places[0]) / kLn10;
    case EntropyMode::unnormalized:
      return place_entropy(dist.places[0]);
    case EntropyMode::both_places:
      return (place_entropy(dist.places[0]) + place_entropy(dist.places[1])) / (2.0 * kLn10);
  }
  return 1.0;
}

}  // namespace cafscore
