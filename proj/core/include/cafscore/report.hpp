// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cafscore/harness.hpp"
#include "cafscore/stats.hpp"

namespace cafscore {

struct MetricAccuracy {
  /// "s_clap", "fleur", "raw" or "caf".
  std::string metric;
  std::string clap_model_id;
  std::string lalm_model_id;
  AccuracyReport report;
};

struct MetricCorrelation {
  std::string metric;
  std::string clap_model_id;
  std::string lalm_model_id;
  CorrelationReport report;
};

struct SweepTable {
  std::string clap_model_id;
  std::string lalm_model_id;
  SweepResult result;
};

struct PoolingTable {
  std::string clap_model_id;
  std::string lalm_model_id;
  double alpha = 0.0;
  std::vector<PoolingRow> rows;
};

struct EvaluationResults {
  /// Configuration fingerprint copied into every result record.
  Json fingerprint = Json::object();
  std::vector<MetricAccuracy> accuracies;
  std::vector<MetricCorrelation> correlations;
  std::vector<SweepTable> sweeps;
  std::vector<PoolingTable> ablations;
  std::vector<TieReport> ties;

  bool empty() const {
    return accuracies.empty() && correlations.empty() && sweeps.empty() && ablations.empty() &&
           ties.empty();
  }
};

/// Writes report.txt and results.jsonl, plus sweep.csv / ties.csv when the
/// corresponding results exist. Output is a pure function of `results`.
/// Throws EvaluationError on empty results and IoError naming the path.
std::vector<std::filesystem::path> emit_report(const EvaluationResults& results,
                                               const std::filesystem::path& out_dir);

/// The human-readable table text that emit_report writes to report.txt.
std::string render_report_text(const EvaluationResults& results);

Json to_json(const AccuracyReport& r);
Json to_json(const TieReport& r);
Json to_json(const CorrelationReport& r);

}  // namespace cafscore
