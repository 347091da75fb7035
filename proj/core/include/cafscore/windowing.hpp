// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cafscore/types.hpp"

namespace cafscore {

struct WindowingConfig {
  double window_len_s = 10.0;
  double hop_s = 1.0;
};

/// 7 s windows for the MS-CLAP family, 10 s for every other CLAP variant; 1 s hop.
WindowingConfig default_windowing_for(std::string_view clap_model_id);

/// Sliding windows starting at 0, hop, 2*hop, ... that fit entirely inside the
/// clip. A clip shorter than one window yields the single window [0, duration).
/// No trailing partial window is produced.
std::vector<WindowSpec> generate_windows(double duration_s, const WindowingConfig& cfg);

/// The one window evaluated by the `none` strategy: [0, min(duration, window_len)).
WindowSpec truncated_window(double duration_s, const WindowingConfig& cfg);

/// Cosine of the angle between a and b, clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// CLAPScore of one text embedding against one audio embedding.
double clap_score(const EmbeddingRecord& text_emb, const EmbeddingRecord& audio_emb);

double pool(std::span<const double> scores, PoolingStrategy strategy);

/// Per-window CLAPScore pooled across windows (S-CLAPScore for `max`).
double s_clap_score(const EmbeddingRecord& text_emb, std::span<const EmbeddingRecord> window_embs,
                    PoolingStrategy strategy);

}  // namespace cafscore
