// SPDX-License-Identifier: Apache-2.0
#include "cafscore/backends.hpp"

#include <cmath>
#include <regex>

#include "cafscore/canonical.hpp"
#include "cafscore/errors.hpp"
#include "cafscore/fleur.hpp"
#include "cafscore/harness.hpp"

namespace cafscore {
namespace {

long long micros(double seconds) { return std::llround(seconds * 1e6); }

bool same_subject(const EmbeddingSubject& a, const EmbeddingSubject& b) {
  if (a.index() != b.index()) return false;
  if (const auto* wa = std::get_if<AudioWindowSubject>(&a)) {
    const auto& wb = std::get<AudioWindowSubject>(b);
    return wa->audio_id == wb.audio_id && micros(wa->window.start_s) == micros(wb.window.start_s) &&
           micros(wa->window.len_s) == micros(wb.window.len_s);
  }
  return std::get<CaptionSubject>(a).caption_id == std::get<CaptionSubject>(b).caption_id;
}

std::string describe(const EmbeddingSubject& s) {
  if (const auto* w = std::get_if<AudioWindowSubject>(&s))
    return "audio '" + w->audio_id + "' window [" + format_double(w->window.start_s) + ", " +
           format_double(w->window.end_s()) + ")";
  return "caption '" + std::get<CaptionSubject>(s).caption_id + "'";
}

class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<1 << 16>& s) : s_(s) { s_.acquire(); }
  ~SlotGuard() { s_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<1 << 16>& s_;
};

}  // namespace

std::string compute_prompt_hash(std::string_view audio_id, std::string_view prompt) {
  return sha256_hex(canonical_dump(Json{{"audio_id", audio_id}, {"prompt", prompt}}));
}

Json to_json(const EmbedRequest& r) {
  return {{"model_id", r.model_id}, {"subject", to_json(r.subject)}};
}

Json to_json(const GenerateRequest& r) {
  return {{"model_id", r.model_id},
          {"audio_id", r.audio_id},
          {"prompt", r.prompt},
          {"prompt_hash", r.prompt_hash},
          {"temperature", 0.0},
          {"logprobs", r.want_logprobs},
          {"top_logprobs", r.want_logprobs ? r.top_logprobs : 0}};
}

// --- FileBackend -------------------------------------------------------------

FileBackend::FileBackend(std::string model_id, const std::vector<std::filesystem::path>& paths)
    : model_id_(std::move(model_id)) {
  for (const auto& path : paths) {
    const auto lines = read_jsonl(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const Json& j = lines[i];
      const std::string kind = j.is_object() && j.contains("kind") && j["kind"].is_string()
                                   ? j["kind"].get<std::string>()
                                   : std::string();
      if (kind != "embedding" && kind != "raw_gen") continue;
      if (j.value("model_id", std::string()) != model_id_) continue;
      try {
        Record rec = decode_record(j);
        if (auto* e = std::get_if<EmbeddingRecord>(&rec)) {
          if (const auto* w = std::get_if<AudioWindowSubject>(&e->subject))
            audio_[{w->audio_id, micros(w->window.start_s), micros(w->window.len_s)}] = std::move(*e);
          else
            captions_[std::get<CaptionSubject>(e->subject).caption_id] = std::move(*e);
        } else if (auto* t = std::get_if<GenerationTrace>(&rec)) {
          traces_[t->prompt_hash] = std::move(*t);
        }
      } catch (const DomainError& e) {
        throw LoadError(path.string() + ": record " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
}

EmbeddingRecord FileBackend::embed(const EmbedRequest& req) {
  if (const auto* w = std::get_if<AudioWindowSubject>(&req.subject)) {
    auto it = audio_.find({w->audio_id, micros(w->window.start_s), micros(w->window.len_s)});
    if (it != audio_.end()) return it->second;
  } else if (auto it = captions_.find(std::get<CaptionSubject>(req.subject).caption_id);
             it != captions_.end()) {
    return it->second;
  }
  throw RecordAbsent("record_absent: no '" + model_id_ + "' embedding for " + describe(req.subject));
}

GenerationTrace FileBackend::generate(const GenerateRequest& req) {
  auto it = traces_.find(req.prompt_hash);
  if (it == traces_.end())
    throw RecordAbsent("record_absent: no '" + model_id_ + "' trace for audio '" + req.audio_id +
                       "' prompt_hash " + req.prompt_hash);
  return it->second;
}

// --- BackendSpec ---------------------------------------------------------------

bool is_valid_base_url(std::string_view url) {
  static const std::regex re(R"(^https?://[A-Za-z0-9.\-_\[\]:]+(:[0-9]{1,5})?(/[^\s]*)?$)");
  return std::regex_match(url.begin(), url.end(), re);
}

std::vector<std::string> BackendSpec::problems() const {
  std::vector<std::string> out;
  if (model_id.empty()) out.push_back("model_id is empty");
  if (kind == Kind::file && paths.empty()) out.push_back("file backend needs at least one path");
  if (kind == Kind::http && !is_valid_base_url(base_url))
    out.push_back("http backend base_url '" + base_url + "' is not a valid http(s) URL");
  if (!(timeout_s > 0.0)) out.push_back("timeout_s must be positive");
  if (max_parallel <= 0) out.push_back("max_parallel must be positive");
  if (retries < 0) out.push_back("retries must be nonnegative");
  return out;
}

std::shared_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (auto p = spec.problems(); !p.empty()) throw DomainError("invalid backend: " + p.front());
  if (spec.kind == BackendSpec::Kind::file) return std::make_shared<FileBackend>(spec.model_id, spec.paths);
  RetryPolicy retry;
  retry.retries = spec.retries;
  return std::make_shared<HttpBackend>(spec.model_id,
                                       make_http_transport(spec.base_url, spec.auth_token, spec.timeout_s),
                                       retry);
}

// --- Fetcher ---------------------------------------------------------------------

Fetcher::Fetcher(std::string model_id, std::shared_ptr<Backend> backend, std::shared_ptr<Cache> cache,
                 int max_parallel, int top_logprobs)
    : model_id_(std::move(model_id)),
      backend_(std::move(backend)),
      cache_(std::move(cache)),
      top_logprobs_(top_logprobs),
      slots_(max_parallel > 0 ? max_parallel : throw DomainError("max_parallel must be positive")) {
  if (!backend_) throw DomainError("Fetcher needs a backend");
}

template <typename Fn>
auto Fetcher::call_backend(Fn&& fn) {
  SlotGuard guard(slots_);
  ++backend_calls_;
  return fn();
}

EmbeddingRecord Fetcher::fetch_embedding(const EmbeddingSubject& subject) {
  const CacheKey key = CacheKey::make(model_id_, "embed", to_json(subject), "");
  if (cache_) {
    if (auto bytes = cache_->get(key)) {
      try {
        auto rec = decode_as<EmbeddingRecord>(Json::parse(*bytes));
        ++cache_hits_;
        return rec;
      } catch (const std::exception&) {
        // Unreadable entry: fall through and refetch.
      }
    }
  }

  EmbeddingRecord rec = call_backend([&] { return backend_->embed(EmbedRequest{model_id_, subject}); });
  auto result = validate(rec);
  if (rec.model_id != model_id_)
    result.violations.push_back("model_id: expected '" + model_id_ + "', got '" + rec.model_id + "'");
  if (!same_subject(rec.subject, subject)) result.violations.push_back("subject: does not match request");
  if (!result.ok()) throw ValidationError("embedding for " + describe(subject) + ": " + result.summary());

  if (cache_) cache_->put(key, encode_record_line(rec));
  return rec;
}

ValidationResult validate_fetched_trace(const GenerationTrace& trace, const std::string& model_id,
                                        bool want_logprobs) {
  auto result = validate(trace);
  if (trace.model_id != model_id)
    result.violations.push_back("model_id: expected '" + model_id + "', got '" + trace.model_id + "'");
  if (want_logprobs) {
    if (trace.token_steps.empty()) result.violations.push_back("token_steps: missing (top_logprobs requested)");
    for (std::size_t i = 0; i < trace.token_steps.size(); ++i) {
      if (trace.token_steps[i].top_logprobs.empty())
        result.violations.push_back("token_steps[" + std::to_string(i) + "]: top_logprobs omitted");
    }
  }
  return result;
}

GenerationTrace Fetcher::fetch_trace(const std::string& audio_id, const std::string& prompt,
                                     bool want_logprobs) {
  GenerateRequest req{model_id_, audio_id, prompt, compute_prompt_hash(audio_id, prompt), want_logprobs,
                      top_logprobs_};
  const CacheKey key =
      CacheKey::make(model_id_, "generate",
                     Json{{"audio_id", audio_id},
                          {"prompt", prompt},
                          {"temperature", 0.0},
                          {"top_logprobs", want_logprobs ? top_logprobs_ : 0}},
                     kPromptTemplateVersion);
  if (cache_) {
    if (auto bytes = cache_->get(key)) {
      try {
        auto trace = decode_as<GenerationTrace>(Json::parse(*bytes));
        ++cache_hits_;
        return trace;
      } catch (const std::exception&) {
      }
    }
  }

  GenerationTrace trace = call_backend([&] { return backend_->generate(req); });
  if (!want_logprobs) trace.token_steps.clear();
  auto result = validate_fetched_trace(trace, model_id_, want_logprobs);
  if (trace.prompt_hash != req.prompt_hash)
    result.violations.push_back("prompt_hash: does not match request");
  if (!result.ok()) throw ValidationError("trace for audio '" + audio_id + "': " + result.summary());

  if (cache_) cache_->put(key, encode_record_line(trace));
  return trace;
}

}  // namespace cafscore
