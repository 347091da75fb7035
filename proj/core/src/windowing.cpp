// SPDX-License-Identifier: Apache-2.0
#include "cafscore/windowing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

std::string lowercase_alnum(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c)) out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace

WindowingConfig default_windowing_for(std::string_view clap_model_id) {
  // "MS-CLAP", "ms_clap", "microsoft/msclap-2023", ...
  const std::string id = lowercase_alnum(clap_model_id);
  const bool ms_clap = id.find("msclap") != std::string::npos ||
                       id.find("microsoftclap") != std::string::npos;
  return WindowingConfig{ms_clap ? 7.0 : 10.0, 1.0};
}

std::vector<WindowSpec> generate_windows(double duration_s, const WindowingConfig& cfg) {
  if (!std::isfinite(duration_s) || duration_s <= 0.0)
    throw DomainError("generate_windows: duration must be positive");
  if (!(cfg.window_len_s > 0.0) || !(cfg.hop_s > 0.0) || !std::isfinite(cfg.window_len_s) ||
      !std::isfinite(cfg.hop_s))
    throw DomainError("generate_windows: window length and hop must be positive");

  if (duration_s < cfg.window_len_s) return {WindowSpec{0.0, duration_s}};

  const auto count =
      static_cast<std::size_t>(std::floor((duration_s - cfg.window_len_s) / cfg.hop_s)) + 1;
  std::vector<WindowSpec> windows;
  windows.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    windows.push_back(WindowSpec{static_cast<double>(k) * cfg.hop_s, cfg.window_len_s});
  return windows;
}

WindowSpec truncated_window(double duration_s, const WindowingConfig& cfg) {
  if (!std::isfinite(duration_s) || duration_s <= 0.0)
    throw DomainError("truncated_window: duration must be positive");
  return WindowSpec{0.0, std::min(duration_s, cfg.window_len_s)};
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("cosine_similarity: length mismatch");
  if (a.empty()) throw DomainError("cosine_similarity: empty vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine_similarity: zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  if (!std::isfinite(c)) throw DomainError("cosine_similarity: non-finite input");
  return std::clamp(c, -1.0, 1.0);
}

double clap_score(const EmbeddingRecord& text_emb, const EmbeddingRecord& audio_emb) {
  if (text_emb.model_id != audio_emb.model_id)
    throw DomainError("clap_score: model id mismatch ('" + text_emb.model_id + "' vs '" +
                      audio_emb.model_id + "')");
  return cosine_similarity(text_emb.vector, audio_emb.vector);
}

double pool(std::span<const double> scores, PoolingStrategy strategy) {
  if (scores.empty()) throw DomainError("pool: empty score list");
  switch (strategy) {
    case PoolingStrategy::none:
      if (scores.size() != 1) throw DomainError("pool: 'none' expects exactly one score");
      return scores.front();
    case PoolingStrategy::avg:
      return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
    case PoolingStrategy::max:
      return *std::max_element(scores.begin(), scores.end());
  }
  throw DomainError("pool: unknown strategy");
}

double s_clap_score(const EmbeddingRecord& text_emb, std::span<const EmbeddingRecord> window_embs,
                    PoolingStrategy strategy) {
  if (window_embs.empty()) throw DomainError("s_clap_score: no windows");
  std::vector<double> scores;
  scores.reserve(window_embs.size());
  for (const auto& w : window_embs) scores.push_back(clap_score(text_emb, w));
  // A single window is its own pooled value whatever the strategy.
  if (scores.size() == 1) return scores.front();
  return pool(scores, strategy);
}

}  // namespace cafscore
