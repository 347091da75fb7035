// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cafscore/types.hpp"

namespace cafscore {

enum class PromptKind { caption, tta };

std::string_view to_string(PromptKind k);
PromptKind parse_prompt_kind(std::string_view s);

/// Version tag of the bundled prompt templates; part of every generation cache key.
inline constexpr std::string_view kPromptTemplateVersion = "v1";

std::string_view prompt_template(PromptKind kind);

/// Caption-grading prompt with `{pred_caption}` replaced by the caption verbatim.
std::string build_caption_prompt(std::string_view caption);

/// Text-to-audio prompt: the audio is graded against the caption.
std::string build_tta_prompt(std::string_view caption);

std::string build_prompt(PromptKind kind, std::string_view caption);

/// Digit probabilities at the first two decimal places of the greedy output.
///
/// The decimal point is the first '.' in the greedy text that directly
/// follows a digit. For each of the two characters after it, the step whose
/// chosen token covers that character is located; every top-logprob
/// alternative at that step whose character at the same in-token offset is a
/// digit contributes exp(logprob) to that digit. When the greedy text ends
/// before a place exists, the step after the last consumed one (typically the
/// end-of-sequence step) supplies the alternatives at in-token offset 0; if
/// there is no such step the place stays empty.
///
/// Throws ExtractionError(no_decimal_point) when the text has no decimal point.
DigitDistribution extract_digit_distributions(const GenerationTrace& trace);

/// FLEUR = sum_j 10^-j * sum_{i=1..9} i * p(i, j). Raw probabilities, no renormalization.
double fleur_score(const DigitDistribution& dist);

struct RawScore {
  enum class Status { parsed, unparseable };

  std::optional<double> value;
  Status status = Status::unparseable;

  bool parsed() const { return status == Status::parsed; }
};

/// Last numeric literal in [0, 1] in the text, so reasoning preambles are skipped.
RawScore parse_raw_score(std::string_view greedy_text);

enum class EntropyMode {
  /// First decimal place, renormalized over digits, divided by ln 10.
  normalized_first_place,
  /// First decimal place, renormalized, natural log, no scaling (can exceed 1).
  unnormalized,
  /// Mean of the normalized entropies of both decimal places.
  both_places,
};

std::string_view to_string(EntropyMode m);
EntropyMode parse_entropy_mode(std::string_view s);

/// Shannon entropy of the digit distribution. A place without digit mass is
/// treated as maximally uncertain.
double distribution_entropy(const DigitDistribution& dist,
                            EntropyMode mode = EntropyMode::normalized_first_place);

}  // namespace cafscore
