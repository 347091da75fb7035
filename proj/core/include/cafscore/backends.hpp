// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include "cafscore/cache.hpp"
#include "cafscore/records.hpp"
#include "cafscore/types.hpp"

namespace cafscore {

inline constexpr int kDefaultTopLogprobs = 20;

struct EmbedRequest {
  std::string model_id;
  EmbeddingSubject subject;
};

struct GenerateRequest {
  std::string model_id;
  std::string audio_id;
  std::string prompt;
  std::string prompt_hash;
  bool want_logprobs = true;
  int top_logprobs = kDefaultTopLogprobs;
};

/// SHA-256 of the canonical {audio_id, prompt} object. File backends key traces on it.
std::string compute_prompt_hash(std::string_view audio_id, std::string_view prompt);

/// Wire bodies for POST /v1/embed and POST /v1/generate. Temperature is always 0.
Json to_json(const EmbedRequest& r);
Json to_json(const GenerateRequest& r);

class Backend {
 public:
  virtual ~Backend() = default;

  virtual EmbeddingRecord embed(const EmbedRequest& req) = 0;
  virtual GenerationTrace generate(const GenerateRequest& req) = 0;
};

/// Read-only backend over exported JSON Lines files (`embedding` and
/// `raw_gen` records). Embeddings are looked up by (audio_id, window) with
/// windows matched to the microsecond, or by caption_id; traces by prompt_hash.
class FileBackend : public Backend {
 public:
  FileBackend(std::string model_id, const std::vector<std::filesystem::path>& paths);

  EmbeddingRecord embed(const EmbedRequest& req) override;
  GenerationTrace generate(const GenerateRequest& req) override;

  std::size_t embedding_count() const { return audio_.size() + captions_.size(); }
  std::size_t trace_count() const { return traces_.size(); }

 private:
  using WindowKey = std::tuple<std::string, long long, long long>;

  std::string model_id_;
  std::map<WindowKey, EmbeddingRecord> audio_;
  std::map<std::string, EmbeddingRecord> captions_;
  std::map<std::string, GenerationTrace> traces_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Minimal HTTP surface used by HttpBackend; swapped out in tests.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;

  /// Returns nullopt on a connection-level failure.
  virtual std::optional<HttpResponse> post_json(const std::string& path, const std::string& body) = 0;
  virtual std::optional<HttpResponse> get(const std::string& path) = 0;
};

/// cpp-httplib client. `auth_token`, when set, is sent as a bearer token.
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::optional<std::string> auth_token,
                                                   double timeout_s);

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds base_delay{200};
  std::chrono::milliseconds max_delay{5000};
};

/// Backend speaking the /v1/embed, /v1/generate, /v1/health protocol.
/// Transport failures and 5xx/429 responses are retried with exponential
/// backoff plus jitter; other 4xx responses fail immediately.
class HttpBackend : public Backend {
 public:
  HttpBackend(std::string model_id, std::shared_ptr<HttpTransport> transport, RetryPolicy retry);

  EmbeddingRecord embed(const EmbedRequest& req) override;
  GenerationTrace generate(const GenerateRequest& req) override;

  /// GET /v1/health; returns the reported model_id.
  std::string health();

  /// Retries spent across all requests so far.
  int retries_used() const { return retries_used_.load(); }

 private:
  Json post_with_retry(const std::string& path, const Json& body);

  std::string model_id_;
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
  std::atomic<int> retries_used_{0};
};

struct BackendSpec {
  enum class Kind { file, http };

  Kind kind = Kind::file;
  std::vector<std::filesystem::path> paths;
  std::string base_url;
  std::optional<std::string> auth_token;
  std::string model_id;
  double timeout_s = 60.0;
  int max_parallel = 4;
  int retries = 3;

  /// Empty when the spec is usable.
  std::vector<std::string> problems() const;
};

std::shared_ptr<Backend> make_backend(const BackendSpec& spec);

/// True for http(s)://host[:port][/path] with a nonempty host.
bool is_valid_base_url(std::string_view url);

/// Cache-first access to one backend with validated results and a bound on
/// simultaneous in-flight backend calls.
class Fetcher {
 public:
  Fetcher(std::string model_id, std::shared_ptr<Backend> backend, std::shared_ptr<Cache> cache,
          int max_parallel, int top_logprobs = kDefaultTopLogprobs);

  const std::string& model_id() const { return model_id_; }

  EmbeddingRecord fetch_embedding(const EmbeddingSubject& subject);
  GenerationTrace fetch_trace(const std::string& audio_id, const std::string& prompt,
                              bool want_logprobs);

  std::size_t backend_calls() const { return backend_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  template <typename Fn>
  auto call_backend(Fn&& fn);

  std::string model_id_;
  std::shared_ptr<Backend> backend_;
  std::shared_ptr<Cache> cache_;
  int top_logprobs_;
  std::counting_semaphore<1 << 16> slots_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

/// Invariant checks applied to every fetched trace.
ValidationResult validate_fetched_trace(const GenerationTrace& trace, const std::string& model_id,
                                        bool want_logprobs);

}  // namespace cafscore
