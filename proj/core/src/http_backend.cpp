// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <random>
#include <thread>

#include "cafscore/backends.hpp"
#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(std::string base_url, std::optional<std::string> token, double timeout_s)
      : token_(std::move(token)), timeout_s_(timeout_s) {
    // Split "scheme://host[:port]" from an optional path prefix.
    const auto scheme_end = base_url.find("://");
    const auto path_start = base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) {
      origin_ = base_url;
    } else {
      origin_ = base_url.substr(0, path_start);
      prefix_ = base_url.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  std::optional<HttpResponse> post_json(const std::string& path, const std::string& body) override {
    auto client = make_client();
    auto res = client->Post(prefix_ + path, headers(), body, "application/json");
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
  }

  std::optional<HttpResponse> get(const std::string& path) override {
    auto client = make_client();
    auto res = client->Get(prefix_ + path, headers());
    if (!res) return std::nullopt;
    return HttpResponse{res->status, res->body};
  }

 private:
  // One client per request: httplib serializes requests on a shared client,
  // which would defeat the caller's parallelism.
  std::unique_ptr<httplib::Client> make_client() const {
    auto client = std::make_unique<httplib::Client>(origin_);
    const auto secs = static_cast<time_t>(timeout_s_);
    const auto usecs = static_cast<time_t>((timeout_s_ - static_cast<double>(secs)) * 1e6);
    client->set_connection_timeout(secs, usecs);
    client->set_read_timeout(secs, usecs);
    client->set_write_timeout(secs, usecs);
    return client;
  }

  httplib::Headers headers() const {
    httplib::Headers h;
    if (token_) h.emplace("Authorization", "Bearer " + *token_);
    return h;
  }

  std::string origin_;
  std::string prefix_;
  std::optional<std::string> token_;
  double timeout_s_;
};

bool retryable(const std::optional<HttpResponse>& res) {
  return !res || res->status >= 500 || res->status == 429;
}

std::string failure_text(const std::optional<HttpResponse>& res) {
  if (!res) return "connection failed";
  return "HTTP " + std::to_string(res->status) + (res->body.empty() ? "" : ": " + res->body.substr(0, 200));
}

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::optional<std::string> auth_token,
                                                   double timeout_s) {
  return std::make_shared<HttplibTransport>(base_url, std::move(auth_token), timeout_s);
}

HttpBackend::HttpBackend(std::string model_id, std::shared_ptr<HttpTransport> transport, RetryPolicy retry)
    : model_id_(std::move(model_id)), transport_(std::move(transport)), retry_(retry) {
  if (!transport_) throw DomainError("HttpBackend needs a transport");
}

Json HttpBackend::post_with_retry(const std::string& path, const Json& body) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const std::string payload = body.dump();
  for (int attempt = 0;; ++attempt) {
    auto res = transport_->post_json(path, payload);
    if (res && res->status >= 200 && res->status < 300) {
      try {
        return Json::parse(res->body);
      } catch (const Json::parse_error& e) {
        throw ValidationError(path + ": response is not JSON: " + e.what());
      }
    }
    if (!retryable(res)) throw TransportError(path + ": " + failure_text(res));
    if (attempt >= retry_.retries)
      throw TransportError(path + ": " + failure_text(res) + " (after " + std::to_string(attempt) + " retries)");

    // Exponential backoff, full jitter over the upper half of the interval.
    const std::chrono::milliseconds cap =
        std::min(retry_.max_delay, std::chrono::milliseconds(retry_.base_delay.count() << std::min(attempt, 20)));
    std::uniform_real_distribution<double> jitter(0.5, 1.0);
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(cap.count() * jitter(rng)));
    ++retries_used_;
  }
}

EmbeddingRecord HttpBackend::embed(const EmbedRequest& req) {
  Json j = post_with_retry("/v1/embed", to_json(req));
  if (j.is_object() && !j.contains("kind")) j["kind"] = "embedding";
  try {
    return decode_as<EmbeddingRecord>(j);
  } catch (const DomainError& e) {
    throw ValidationError("/v1/embed: " + std::string(e.what()));
  }
}

GenerationTrace HttpBackend::generate(const GenerateRequest& req) {
  Json j = post_with_retry("/v1/generate", to_json(req));
  if (j.is_object()) {
    if (!j.contains("kind")) j["kind"] = "raw_gen";
    if (!req.want_logprobs) j["token_steps"] = Json::array();
  }
  try {
    return decode_as<GenerationTrace>(j);
  } catch (const DomainError& e) {
    throw ValidationError("/v1/generate: " + std::string(e.what()));
  }
}

std::string HttpBackend::health() {
  auto res = transport_->get("/v1/health");
  if (!res || res->status != 200) throw TransportError("/v1/health: " + failure_text(res));
  try {
    const Json j = Json::parse(res->body);
    if (j.value("status", std::string()) != "ok") throw TransportError("/v1/health: status is not ok");
    return j.value("model_id", std::string());
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("/v1/health: ") + e.what());
  }
}

}  // namespace cafscore
