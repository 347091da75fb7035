// SPDX-License-Identifier: Apache-2.0
// Access to the end-to-end fixture under tests/data/e2e.
#pragma once

#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <vector>

#include "cafscore/commands.hpp"
#include "fakes.hpp"

namespace fixture {

inline std::filesystem::path data_dir() { return std::filesystem::path(CAFSCORE_TEST_DATA_DIR) / "e2e"; }

/// The e2e config with output and cache redirected into `scratch`.
inline cafscore::cli::RunConfig e2e_config(const fake::TempDir& scratch) {
  auto cfg = cafscore::cli::load_run_config(data_dir() / "config.yaml");
  cfg.output_dir = scratch / "out";
  cfg.cache_dir = scratch / "cache";
  return cfg;
}

/// Runtime whose backends are wrapped in CountingBackend, with output captured.
struct CountingRuntime {
  cafscore::cli::Runtime rt;
  std::ostringstream out, err;
  std::vector<std::shared_ptr<fake::CountingBackend>> backends;
  int constructed = 0;
  std::mutex mu;

  explicit CountingRuntime(std::chrono::microseconds delay = std::chrono::microseconds(0)) {
    rt.out = &out;
    rt.err = &err;
    rt.make_backend = [this, delay](const cafscore::BackendSpec& spec) -> std::shared_ptr<cafscore::Backend> {
      std::lock_guard lock(mu);
      ++constructed;
      auto b = std::make_shared<fake::CountingBackend>(cafscore::make_backend(spec), delay);
      backends.push_back(b);
      return b;
    };
  }

  int calls() const {
    int n = 0;
    for (const auto& b : backends) n += b->calls();
    return n;
  }
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// results.jsonl accuracy records keyed by metric name.
inline std::map<std::string, cafscore::Json> accuracy_records(const std::filesystem::path& out_dir) {
  std::map<std::string, cafscore::Json> out;
  std::istringstream lines(slurp(out_dir / "results.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    auto j = cafscore::Json::parse(line);
    if (j["kind"] == "accuracy") out[j["metric"].get<std::string>()] = j;
  }
  return out;
}

}  // namespace fixture
