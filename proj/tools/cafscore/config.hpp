// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cafscore/backends.hpp"
#include "cafscore/fleur.hpp"
#include "cafscore/harness.hpp"
#include "cafscore/types.hpp"
#include "cafscore/windowing.hpp"

namespace cafscore::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ClapModelConfig {
  WindowingConfig windowing;
  std::string backend;
};

struct LalmModelConfig {
  std::string backend;
  PromptKind prompt = PromptKind::caption;
  int top_logprobs = kDefaultTopLogprobs;
};

enum class DatasetKind { preference, rating };

struct FusionConfig {
  /// nullopt means adaptive.
  std::optional<double> alpha = 0.8;
  PoolingStrategy pooling = PoolingStrategy::max;
  std::vector<double> alpha_grid{0.0, 0.2, 0.5, 0.8, 1.0};
};

struct RunConfig {
  std::map<std::string, BackendSpec> backends;
  std::map<std::string, ClapModelConfig> clap_models;
  std::map<std::string, LalmModelConfig> lalm_models;
  FusionConfig fusion;
  std::filesystem::path dataset_path;
  DatasetKind dataset_kind = DatasetKind::preference;
  TiePolicy tie_policy = TiePolicy::zero_credit;
  std::filesystem::path output_dir = "cafscore-out";
  EntropyMode entropy_mode = EntropyMode::normalized_first_place;
  std::optional<std::filesystem::path> cache_dir;
  /// Items scored concurrently.
  int workers = 4;
};

/// Parses a YAML config. Relative paths resolve against the config file's
/// directory. Environment overrides: CAF_CACHE_DIR, CAF_DATASET,
/// CAF_OUTPUT_DIR; http backends read bearer tokens from `auth_env`.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir);

/// Cross-reference checks (models present, backends defined). Throws ConfigError.
void check_run_config(const RunConfig& cfg);

std::optional<double> parse_alpha_setting(const std::string& s);

}  // namespace cafscore::cli
