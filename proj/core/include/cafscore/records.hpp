// SPDX-License-Identifier: Apache-2.0
//
// JSON Lines interchange. Every record is one JSON object per line carrying a
// `kind` discriminator. Unknown top-level fields (and unknown fields of nested
// audio/caption objects) survive a decode/encode cycle through `extra`.
#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cafscore/errors.hpp"
#include "cafscore/types.hpp"

namespace cafscore {

enum class RecordKind { embedding, digit_dist, raw_gen, score_bundle, pref_item, rating_item };

std::string_view to_string(RecordKind k);
RecordKind parse_record_kind(std::string_view s);

using Record = std::variant<EmbeddingRecord, DigitDistribution, GenerationTrace, ScoreBundle,
                            PreferenceItem, RatingItem>;

RecordKind kind_of(const Record& r);

struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

Json to_json(const EmbeddingRecord& r);
Json to_json(const DigitDistribution& r);
Json to_json(const GenerationTrace& r);
Json to_json(const ScoreBundle& r);
Json to_json(const PreferenceItem& r);
Json to_json(const RatingItem& r);
Json to_json(const Record& r);

/// Decodes a parsed record. Throws DomainError listing every type problem
/// and every invariant violation.
Record decode_record(const Json& j);
Record decode_record_line(std::string_view line);

/// Decodes expecting a particular kind; throws DomainError on a mismatch.
template <typename T>
T decode_as(const Json& j) {
  auto rec = decode_record(j);
  if (auto* p = std::get_if<T>(&rec)) return std::move(*p);
  throw DomainError("unexpected record kind '" + std::string(to_string(kind_of(rec))) + "'");
}

std::string encode_record_line(const Record& r);

/// Checks a parsed record (any kind) and reports all violations, never throws.
ValidationResult validate_record(const Json& j);

/// Invariant checks on already-typed values.
ValidationResult validate(const EmbeddingRecord& r);
ValidationResult validate(const DigitDistribution& r);
ValidationResult validate(const GenerationTrace& r);
ValidationResult validate(const ScoreBundle& r);
ValidationResult validate(const PreferenceItem& r);
ValidationResult validate(const RatingItem& r);
ValidationResult validate(const Record& r);

Json to_json(const AudioClipRef& a);
Json to_json(const CaptionCandidate& c);
Json to_json(const WindowSpec& w);
Json to_json(const EmbeddingSubject& s);

}  // namespace cafscore
