// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cafscore/backends.hpp"
#include "cafscore/config.hpp"

namespace cafscore::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitBackend = 4,
  kExitPartial = 5,
};

using BackendFactory = std::function<std::shared_ptr<Backend>(const BackendSpec&)>;

/// Process-level collaborators, replaceable in tests.
struct Runtime {
  BackendFactory make_backend = [](const BackendSpec& spec) { return cafscore::make_backend(spec); };
  std::ostream* out = &std::cout;
  std::ostream* err = &std::cerr;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::filesystem::path> dataset;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> cache;
  std::optional<std::string> alpha;
  std::optional<std::string> pooling;
  std::optional<std::string> tie_policy;
};

void apply_overrides(RunConfig& cfg, const Overrides& o);

struct ScoreRequest {
  std::string audio_id;
  double duration_s = 0.0;
  std::string caption;
  std::string caption_id = "caption";
};

int cmd_score(const RunConfig& cfg, const ScoreRequest& req, bool dry_run, Runtime& rt);
int cmd_evaluate(const RunConfig& cfg, bool dry_run, Runtime& rt);
int cmd_sweep_alpha(const RunConfig& cfg, bool dry_run, Runtime& rt);
int cmd_tie_report(const RunConfig& cfg, bool dry_run, Runtime& rt);
int cmd_cache_gc(const std::filesystem::path& cache_dir, std::uintmax_t max_bytes, Runtime& rt);
int cmd_validate(const std::vector<std::filesystem::path>& files, Runtime& rt);

/// Runs a command body, mapping escaped exceptions to exit codes and
/// printing the failing stage to rt.err.
int guarded(Runtime& rt, const std::function<int()>& body);

/// Exit code for an exception, following nested StageErrors to the root cause.
int exit_code_for(const std::exception& e);

}  // namespace cafscore::cli
