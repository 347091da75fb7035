// SPDX-License-Identifier: Apache-2.0
#include "cafscore/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <set>

#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

constexpr double kMassSlack = 1e-9;
constexpr double kFleurMax = 0.99;
constexpr double kEndpointTol = 1e-12;

using Errors = std::vector<std::string>;

// Reads typed fields out of a JSON object, turning every type problem into a
// violation message instead of an exception.
class Reader {
 public:
  Reader(const Json& j, std::string prefix, Errors& errs)
      : j_(j), prefix_(std::move(prefix)), errs_(errs) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool ok() const { return j_.is_object(); }

  bool has(const std::string& key) const {
    return ok() && j_.contains(key) && !j_.at(key).is_null();
  }

  const Json* field(const std::string& key, bool required = true) {
    if (!ok()) return nullptr;
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) {
      if (required) fail(key, "missing");
      return nullptr;
    }
    return &*it;
  }

  std::string str(const std::string& key, bool required = true) {
    const Json* v = field(key, required);
    if (!v) return {};
    if (!v->is_string()) {
      fail(key, "expected a string");
      return {};
    }
    return v->get<std::string>();
  }

  double num(const std::string& key) {
    const Json* v = field(key);
    if (!v) return 0.0;
    if (!v->is_number()) {
      fail(key, "expected a number");
      return 0.0;
    }
    return v->get<double>();
  }

  std::optional<double> opt_num(const std::string& key) {
    const Json* v = field(key, false);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      fail(key, "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const Json* v = field(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      fail(key, "expected an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  const Json* object(const std::string& key, bool required = true) {
    const Json* v = field(key, required);
    if (v && !v->is_object()) {
      fail(key, "expected an object");
      return nullptr;
    }
    return v;
  }

  const Json* array(const std::string& key) {
    const Json* v = field(key);
    if (v && !v->is_array()) {
      fail(key, "expected an array");
      return nullptr;
    }
    return v;
  }

  template <typename Enum, typename Parse>
  Enum enumeration(const std::string& key, Enum fallback, Parse parse, bool required = true) {
    std::string s = str(key, required);
    if (s.empty()) return fallback;
    try {
      return parse(s);
    } catch (const DomainError& e) {
      fail(key, e.what());
      return fallback;
    }
  }

  Json extras(std::initializer_list<std::string_view> known) const {
    Json out = Json::object();
    if (!ok()) return out;
    for (const auto& [k, v] : j_.items()) {
      if (std::find(known.begin(), known.end(), k) == known.end()) out[k] = v;
    }
    return out;
  }

  std::string path(const std::string& key) const {
    if (prefix_.empty()) return key;
    if (key.empty()) return prefix_;
    return prefix_ + "." + key;
  }

  void fail(const std::string& key, const std::string& msg) {
    std::string p = path(key);
    errs_.push_back(p.empty() ? msg : p + ": " + msg);
  }

 private:
  const Json& j_;
  std::string prefix_;
  Errors& errs_;
};

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

Json merged(const Json& extra, Json known) {
  Json out = extra.is_object() ? extra : Json::object();
  for (auto& [k, v] : known.items()) out[k] = std::move(v);
  return out;
}

// --- decoders ----------------------------------------------------------------

AudioClipRef decode_audio(const Json& j, const std::string& prefix, Errors& errs) {
  Reader r(j, prefix, errs);
  AudioClipRef a;
  a.id = r.str("id");
  a.duration_s = r.num("duration_s");
  a.source = r.str("source", false);
  a.extra = r.extras({"id", "duration_s", "source"});
  return a;
}

CaptionCandidate decode_caption(const Json& j, const std::string& prefix, Errors& errs) {
  Reader r(j, prefix, errs);
  CaptionCandidate c;
  c.id = r.str("id");
  c.text = r.str("text");
  c.origin = r.enumeration("origin", CaptionOrigin::unknown, parse_caption_origin, false);
  c.extra = r.extras({"id", "text", "origin"});
  return c;
}

WindowSpec decode_window(const Json& j, const std::string& prefix, Errors& errs) {
  Reader r(j, prefix, errs);
  return WindowSpec{r.num("start_s"), r.num("len_s")};
}

EmbeddingSubject decode_subject(const Json& j, const std::string& prefix, Errors& errs) {
  Reader r(j, prefix, errs);
  if (r.has("caption_id")) {
    CaptionSubject s;
    s.caption_id = r.str("caption_id");
    s.text = r.str("text", false);
    return s;
  }
  AudioWindowSubject s;
  s.audio_id = r.str("audio_id");
  if (const Json* w = r.object("window")) s.window = decode_window(*w, join_path(prefix, "window"), errs);
  return s;
}

EmbeddingRecord decode_embedding(const Json& j, Errors& errs) {
  Reader r(j, "", errs);
  EmbeddingRecord e;
  if (const Json* s = r.object("subject")) e.subject = decode_subject(*s, "subject", errs);
  e.model_id = r.str("model_id");
  if (auto d = r.integer("dim")) {
    if (*d <= 0) r.fail("dim", "must be positive");
    else e.dim = static_cast<std::size_t>(*d);
  }
  if (const Json* v = r.array("vector")) {
    e.vector.reserve(v->size());
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        r.fail("vector[" + std::to_string(i) + "]", "expected a number");
        e.vector.push_back(0.0);
      } else {
        e.vector.push_back((*v)[i].get<double>());
      }
    }
  }
  e.extra = r.extras({"kind", "subject", "model_id", "dim", "vector"});
  return e;
}

DigitMap decode_digit_map(const Json& j, const std::string& prefix, Errors& errs) {
  DigitMap m;
  if (!j.is_object()) {
    errs.push_back(prefix + ": expected an object");
    return m;
  }
  for (const auto& [k, v] : j.items()) {
    if (k.size() != 1 || k[0] < '0' || k[0] > '9') {
      errs.push_back(prefix + ": key '" + k + "' is not a digit 0-9");
      continue;
    }
    if (!v.is_number()) {
      errs.push_back(prefix + "." + k + ": expected a number");
      continue;
    }
    m[k[0] - '0'] = v.get<double>();
  }
  return m;
}

DigitDistribution decode_digit_dist(const Json& j, Errors& errs) {
  Reader r(j, "", errs);
  DigitDistribution d;
  if (const Json* places = r.array("places")) {
    if (places->size() != 2) r.fail("places", "expected exactly 2 entries");
    for (std::size_t i = 0; i < std::min<std::size_t>(2, places->size()); ++i)
      d.places[i] = decode_digit_map((*places)[i], "places[" + std::to_string(i) + "]", errs);
  }
  if (const Json* prov = r.object("provenance")) {
    Reader p(*prov, "provenance", errs);
    d.greedy_text = p.str("greedy_text");
    d.model_id = p.str("model_id");
  }
  d.extra = r.extras({"kind", "places", "provenance"});
  return d;
}

GenerationTrace decode_trace(const Json& j, Errors& errs) {
  Reader r(j, "", errs);
  GenerationTrace t;
  t.model_id = r.str("model_id");
  t.prompt_hash = r.str("prompt_hash");
  t.greedy_text = r.str("greedy_text");
  if (const Json* steps = r.array("token_steps")) {
    for (std::size_t i = 0; i < steps->size(); ++i) {
      std::string prefix = "token_steps[" + std::to_string(i) + "]";
      Reader s((*steps)[i], prefix, errs);
      TokenStep step;
      step.chosen_token_text = s.str("chosen_token_text");
      if (const Json* lps = s.object("top_logprobs")) {
        for (const auto& [tok, lp] : lps->items()) {
          if (!lp.is_number()) {
            errs.push_back(prefix + ".top_logprobs['" + tok + "']: expected a number");
            continue;
          }
          step.top_logprobs[tok] = lp.get<double>();
        }
      }
      t.token_steps.push_back(std::move(step));
    }
  }
  t.extra = r.extras({"kind", "model_id", "prompt_hash", "greedy_text", "token_steps"});
  return t;
}

ScoreBundle decode_bundle(const Json& j, Errors& errs) {
  Reader r(j, "", errs);
  ScoreBundle b;
  b.audio_id = r.str("audio_id");
  b.caption_id = r.str("caption_id");
  b.clap_model_id = r.str("clap_model_id", false);
  b.lalm_model_id = r.str("lalm_model_id", false);
  if (const Json* m = r.object("s_clap_by_strategy", false)) {
    for (const auto& [k, v] : m->items()) {
      try {
        PoolingStrategy s = parse_pooling(k);
        if (!v.is_number()) throw DomainError("expected a number");
        b.s_clap_by_strategy[s] = v.get<double>();
      } catch (const DomainError& e) {
        errs.push_back("s_clap_by_strategy." + k + ": " + e.what());
      }
    }
  }
  b.pooling = r.enumeration("pooling", PoolingStrategy::max, parse_pooling, false);
  b.fleur = r.opt_num("fleur");
  b.raw = r.opt_num("raw");
  b.entropy = r.opt_num("entropy");
  if (const Json* m = r.object("caf_by_alpha", false)) {
    for (const auto& [k, v] : m->items()) {
      double alpha = 0.0;
      auto [end, ec] = std::from_chars(k.data(), k.data() + k.size(), alpha);
      if (ec != std::errc{} || end != k.data() + k.size()) {
        errs.push_back("caf_by_alpha: key '" + k + "' is not a number");
        continue;
      }
      if (!v.is_number()) {
        errs.push_back("caf_by_alpha." + k + ": expected a number");
        continue;
      }
      b.caf_by_alpha[alpha] = v.get<double>();
    }
  }
  b.extra = r.extras({"kind", "audio_id", "caption_id", "clap_model_id", "lalm_model_id",
                      "s_clap_by_strategy", "pooling", "fleur", "raw", "entropy", "caf_by_alpha"});
  return b;
}

PreferenceItem decode_pref(const Json& j, Errors& errs) {
  Reader r(j, "", errs);
  PreferenceItem p;
  if (const Json* a = r.object("audio")) p.audio = decode_audio(*a, "audio", errs);
  if (const Json* c = r.object("caption_a")) p.caption_a = decode_caption(*c, "caption_a", errs);
  if (const Json* c = r.object("caption_b")) p.caption_b = decode_caption(*c, "caption_b", errs);
  p.human_choice = r.enumeration("human_choice", HumanChoice::A, parse_human_choice);
  p.pair_type = r.enumeration("pair_type", PairType::HH, parse_pair_type);
  p.subset = r.str("subset");
  p.extra = r.extras({"kind", "audio", "caption_a", "caption_b", "human_choice", "pair_type", "subset"});
  return p;
}

RatingItem decode_rating(const Json& j, Errors& errs) {
  Reader r(j, "", errs);
  RatingItem it;
  if (const Json* a = r.object("audio")) it.audio = decode_audio(*a, "audio", errs);
  if (const Json* c = r.object("caption")) it.caption = decode_caption(*c, "caption", errs);
  it.human_rating = r.num("human_rating");
  it.extra = r.extras({"kind", "audio", "caption", "human_rating"});
  return it;
}

// --- invariant checks ----------------------------------------------------------

void check_audio(const AudioClipRef& a, const std::string& prefix, Errors& errs) {
  if (a.id.empty()) errs.push_back(prefix + ".id: empty");
  if (!std::isfinite(a.duration_s) || a.duration_s <= 0.0)
    errs.push_back(prefix + ".duration_s: must be > 0");
}

void check_caption(const CaptionCandidate& c, const std::string& prefix, Errors& errs) {
  if (c.id.empty()) errs.push_back(prefix + ".id: empty");
  if (blank(c.text)) errs.push_back(prefix + ".text: empty after trimming whitespace");
}

void check(const EmbeddingRecord& e, Errors& errs) {
  if (const auto* w = std::get_if<AudioWindowSubject>(&e.subject)) {
    if (w->audio_id.empty()) errs.push_back("subject.audio_id: empty");
    if (!std::isfinite(w->window.start_s) || w->window.start_s < 0.0)
      errs.push_back("subject.window.start_s: must be >= 0");
    if (!std::isfinite(w->window.len_s) || w->window.len_s <= 0.0)
      errs.push_back("subject.window.len_s: must be > 0");
  } else if (std::get<CaptionSubject>(e.subject).caption_id.empty()) {
    errs.push_back("subject.caption_id: empty");
  }
  if (e.model_id.empty()) errs.push_back("model_id: empty");
  if (e.dim == 0) errs.push_back("dim: must be positive");
  if (e.vector.size() != e.dim)
    errs.push_back("vector: length mismatch (dim " + std::to_string(e.dim) + ", length " +
                   std::to_string(e.vector.size()) + ")");
  bool all_zero = true;
  for (std::size_t i = 0; i < e.vector.size(); ++i) {
    if (!std::isfinite(e.vector[i])) errs.push_back("vector[" + std::to_string(i) + "]: not finite");
    if (e.vector[i] != 0.0) all_zero = false;
  }
  if (!e.vector.empty() && all_zero) errs.push_back("vector: zero vector");
}

void check(const DigitDistribution& d, Errors& errs) {
  for (std::size_t i = 0; i < d.places.size(); ++i) {
    const std::string prefix = "places[" + std::to_string(i) + "]";
    double mass = 0.0;
    for (const auto& [digit, p] : d.places[i]) {
      if (digit < 0 || digit > 9) errs.push_back(prefix + ": digit " + std::to_string(digit) + " out of range");
      if (!(p >= 0.0 && p <= 1.0))
        errs.push_back(prefix + "." + std::to_string(digit) + ": probability outside [0, 1]");
      mass += p;
    }
    if (mass > 1.0 + kMassSlack) errs.push_back(prefix + ": mass exceeds 1 (" + format_double(mass) + ")");
  }
}

void check(const GenerationTrace& t, Errors& errs) {
  if (t.model_id.empty()) errs.push_back("model_id: empty");
  for (std::size_t i = 0; i < t.token_steps.size(); ++i) {
    const auto& step = t.token_steps[i];
    const std::string prefix = "token_steps[" + std::to_string(i) + "]";
    for (const auto& [tok, lp] : step.top_logprobs) {
      if (!(lp <= 0.0)) errs.push_back(prefix + ".top_logprobs['" + tok + "']: logprob must be <= 0");
    }
    if (!step.top_logprobs.contains(step.chosen_token_text))
      errs.push_back(prefix + ": chosen token missing from top_logprobs");
  }
}

void check(const ScoreBundle& b, Errors& errs) {
  if (b.audio_id.empty()) errs.push_back("audio_id: empty");
  if (b.caption_id.empty()) errs.push_back("caption_id: empty");
  for (const auto& [s, v] : b.s_clap_by_strategy) {
    if (!(v >= -1.0 && v <= 1.0))
      errs.push_back("s_clap_by_strategy." + std::string(to_string(s)) + ": outside [-1, 1]");
  }
  if (b.fleur && !(*b.fleur >= 0.0 && *b.fleur <= kFleurMax + kEndpointTol))
    errs.push_back("fleur: outside [0, 0.99]");
  if (b.raw && !(*b.raw >= 0.0 && *b.raw <= 1.0)) errs.push_back("raw: outside [0, 1]");
  if (b.entropy && !(*b.entropy >= 0.0)) errs.push_back("entropy: must be >= 0");
  for (const auto& [alpha, v] : b.caf_by_alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) errs.push_back("caf_by_alpha: alpha " + format_double(alpha) + " outside [0, 1]");
    if (!std::isfinite(v)) errs.push_back("caf_by_alpha: non-finite value");
  }
  if (auto it = b.caf_by_alpha.find(1.0); it != b.caf_by_alpha.end()) {
    auto s = b.s_clap();
    if (!s || std::abs(it->second - *s) > kEndpointTol)
      errs.push_back("caf_by_alpha[1]: must equal the selected s_clap");
  }
  if (auto it = b.caf_by_alpha.find(0.0); it != b.caf_by_alpha.end()) {
    if (!b.fleur || std::abs(it->second - *b.fleur) > kEndpointTol)
      errs.push_back("caf_by_alpha[0]: must equal fleur");
  }
}

void check(const PreferenceItem& p, Errors& errs) {
  check_audio(p.audio, "audio", errs);
  check_caption(p.caption_a, "caption_a", errs);
  check_caption(p.caption_b, "caption_b", errs);
  if (!p.caption_a.id.empty() && p.caption_a.id == p.caption_b.id)
    errs.push_back("caption_b.id: must differ from caption_a.id");
  if (p.subset.empty()) errs.push_back("subset: empty");
}

void check(const RatingItem& r, Errors& errs) {
  check_audio(r.audio, "audio", errs);
  check_caption(r.caption, "caption", errs);
  if (!std::isfinite(r.human_rating)) errs.push_back("human_rating: not finite");
}

Record decode_collecting(const Json& j, Errors& errs) {
  if (!j.is_object()) {
    errs.push_back("record: expected a JSON object");
    return ScoreBundle{};
  }
  auto it = j.find("kind");
  if (it == j.end() || !it->is_string()) {
    errs.push_back("kind: missing or not a string");
    return ScoreBundle{};
  }
  RecordKind kind;
  try {
    kind = parse_record_kind(it->get<std::string>());
  } catch (const DomainError& e) {
    errs.push_back(std::string("kind: ") + e.what());
    return ScoreBundle{};
  }
  switch (kind) {
    case RecordKind::embedding: return decode_embedding(j, errs);
    case RecordKind::digit_dist: return decode_digit_dist(j, errs);
    case RecordKind::raw_gen: return decode_trace(j, errs);
    case RecordKind::score_bundle: return decode_bundle(j, errs);
    case RecordKind::pref_item: return decode_pref(j, errs);
    case RecordKind::rating_item: return decode_rating(j, errs);
  }
  return ScoreBundle{};
}

std::string join(const Errors& errs) {
  std::string out;
  for (const auto& e : errs) {
    if (!out.empty()) out += "; ";
    out += e;
  }
  return out;
}

}  // namespace

std::string ValidationResult::summary() const { return join(violations); }

std::string_view to_string(RecordKind k) {
  switch (k) {
    case RecordKind::embedding: return "embedding";
    case RecordKind::digit_dist: return "digit_dist";
    case RecordKind::raw_gen: return "raw_gen";
    case RecordKind::score_bundle: return "score_bundle";
    case RecordKind::pref_item: return "pref_item";
    case RecordKind::rating_item: return "rating_item";
  }
  return "embedding";
}

RecordKind parse_record_kind(std::string_view s) {
  for (auto k : {RecordKind::embedding, RecordKind::digit_dist, RecordKind::raw_gen,
                 RecordKind::score_bundle, RecordKind::pref_item, RecordKind::rating_item}) {
    if (to_string(k) == s) return k;
  }
  throw DomainError("unknown record kind '" + std::string(s) + "'");
}

RecordKind kind_of(const Record& r) {
  return std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, EmbeddingRecord>) return RecordKind::embedding;
        else if constexpr (std::is_same_v<T, DigitDistribution>) return RecordKind::digit_dist;
        else if constexpr (std::is_same_v<T, GenerationTrace>) return RecordKind::raw_gen;
        else if constexpr (std::is_same_v<T, ScoreBundle>) return RecordKind::score_bundle;
        else if constexpr (std::is_same_v<T, PreferenceItem>) return RecordKind::pref_item;
        else return RecordKind::rating_item;
      },
      r);
}

// --- encoders ------------------------------------------------------------------

Json to_json(const AudioClipRef& a) {
  return merged(a.extra, {{"id", a.id}, {"duration_s", a.duration_s}, {"source", a.source}});
}

Json to_json(const CaptionCandidate& c) {
  return merged(c.extra, {{"id", c.id}, {"text", c.text}, {"origin", to_string(c.origin)}});
}

Json to_json(const WindowSpec& w) { return {{"start_s", w.start_s}, {"len_s", w.len_s}}; }

Json to_json(const EmbeddingSubject& s) {
  if (const auto* w = std::get_if<AudioWindowSubject>(&s))
    return {{"audio_id", w->audio_id}, {"window", to_json(w->window)}};
  const auto& c = std::get<CaptionSubject>(s);
  Json j{{"caption_id", c.caption_id}};
  if (!c.text.empty()) j["text"] = c.text;
  return j;
}

Json to_json(const EmbeddingRecord& r) {
  return merged(r.extra, {{"kind", "embedding"},
                          {"subject", to_json(r.subject)},
                          {"model_id", r.model_id},
                          {"dim", r.dim},
                          {"vector", r.vector}});
}

Json to_json(const DigitDistribution& r) {
  Json places = Json::array();
  for (const auto& place : r.places) {
    Json m = Json::object();
    for (const auto& [d, p] : place) m[std::to_string(d)] = p;
    places.push_back(std::move(m));
  }
  return merged(r.extra, {{"kind", "digit_dist"},
                          {"places", std::move(places)},
                          {"provenance", {{"greedy_text", r.greedy_text}, {"model_id", r.model_id}}}});
}

Json to_json(const GenerationTrace& r) {
  Json steps = Json::array();
  for (const auto& s : r.token_steps) {
    Json lps = Json::object();
    for (const auto& [tok, lp] : s.top_logprobs) lps[tok] = lp;
    steps.push_back({{"chosen_token_text", s.chosen_token_text}, {"top_logprobs", std::move(lps)}});
  }
  return merged(r.extra, {{"kind", "raw_gen"},
                          {"model_id", r.model_id},
                          {"prompt_hash", r.prompt_hash},
                          {"greedy_text", r.greedy_text},
                          {"token_steps", std::move(steps)}});
}

Json to_json(const ScoreBundle& r) {
  Json by_strategy = Json::object();
  for (const auto& [s, v] : r.s_clap_by_strategy) by_strategy[std::string(to_string(s))] = v;
  Json caf = Json::object();
  for (const auto& [alpha, v] : r.caf_by_alpha) caf[format_double(alpha)] = v;
  Json j{{"kind", "score_bundle"},
         {"audio_id", r.audio_id},
         {"caption_id", r.caption_id},
         {"clap_model_id", r.clap_model_id},
         {"lalm_model_id", r.lalm_model_id},
         {"s_clap_by_strategy", std::move(by_strategy)},
         {"pooling", to_string(r.pooling)},
         {"caf_by_alpha", std::move(caf)}};
  if (r.fleur) j["fleur"] = *r.fleur;
  if (r.raw) j["raw"] = *r.raw;
  if (r.entropy) j["entropy"] = *r.entropy;
  return merged(r.extra, std::move(j));
}

Json to_json(const PreferenceItem& r) {
  return merged(r.extra, {{"kind", "pref_item"},
                          {"audio", to_json(r.audio)},
                          {"caption_a", to_json(r.caption_a)},
                          {"caption_b", to_json(r.caption_b)},
                          {"human_choice", to_string(r.human_choice)},
                          {"pair_type", to_string(r.pair_type)},
                          {"subset", r.subset}});
}

Json to_json(const RatingItem& r) {
  return merged(r.extra, {{"kind", "rating_item"},
                          {"audio", to_json(r.audio)},
                          {"caption", to_json(r.caption)},
                          {"human_rating", r.human_rating}});
}

Json to_json(const Record& r) {
  return std::visit([](const auto& v) { return to_json(v); }, r);
}

// --- entry points ----------------------------------------------------------------

Record decode_record(const Json& j) {
  Errors errs;
  Record rec = decode_collecting(j, errs);
  if (errs.empty()) std::visit([&](const auto& v) { check(v, errs); }, rec);
  if (!errs.empty()) throw DomainError(join(errs));
  return rec;
}

Record decode_record_line(std::string_view line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const Json::parse_error& e) {
    throw DomainError(std::string("malformed JSON: ") + e.what());
  }
  return decode_record(j);
}

std::string encode_record_line(const Record& r) { return to_json(r).dump(); }

ValidationResult validate_record(const Json& j) {
  ValidationResult out;
  Record rec = decode_collecting(j, out.violations);
  // Skip invariant checks when the kind itself could not be determined.
  bool kind_known = j.is_object() && j.contains("kind") && j["kind"].is_string();
  if (kind_known) {
    try {
      parse_record_kind(j["kind"].get<std::string>());
    } catch (const DomainError&) {
      kind_known = false;
    }
  }
  if (kind_known) std::visit([&](const auto& v) { check(v, out.violations); }, rec);
  return out;
}

ValidationResult validate(const Record& r) {
  ValidationResult out;
  std::visit([&](const auto& v) { check(v, out.violations); }, r);
  return out;
}

ValidationResult validate(const EmbeddingRecord& r) { return validate(Record(r)); }
ValidationResult validate(const DigitDistribution& r) { return validate(Record(r)); }
ValidationResult validate(const GenerationTrace& r) { return validate(Record(r)); }
ValidationResult validate(const ScoreBundle& r) { return validate(Record(r)); }
ValidationResult validate(const PreferenceItem& r) { return validate(Record(r)); }
ValidationResult validate(const RatingItem& r) { return validate(Record(r)); }

}  // namespace cafscore
