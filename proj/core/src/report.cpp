// SPDX-License-Identifier: Apache-2.0
#include "cafscore/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cafscore/canonical.hpp"
#include "cafscore/errors.hpp"

namespace cafscore {
namespace {

std::string fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string cell(const Tally& t) { return t.total > 0 ? fixed(t.accuracy) : "-"; }

std::string model_label(const std::string& clap, const std::string& lalm) {
  if (clap.empty()) return lalm;
  if (lalm.empty()) return clap;
  return clap + " + " + lalm;
}

Json to_json(const Tally& t) {
  return {{"correct", t.correct}, {"ties", t.ties}, {"total", t.total}, {"accuracy", t.accuracy}};
}

Json to_json(const SubsetAccuracy& s) {
  Json per_type = Json::object();
  for (const auto& [type, tally] : s.per_type) per_type[std::string(to_string(type))] = to_json(tally);
  return {{"subset", s.subset}, {"per_type", per_type}, {"total", to_json(s.total)},
          {"total_accuracy", s.total_accuracy}};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw IoError(path.string() + ": write failed");
}

std::string sweep_csv(const SweepResult& r) {
  std::string csv = "alpha,overall_accuracy\n";
  for (const auto& p : r.points) csv += format_double(p.alpha) + "," + format_double(p.overall_accuracy) + "\n";
  return csv;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ? c : '_');
  return out;
}

std::string metric_label(const std::string& metric, const std::string& clap, const std::string& lalm) {
  return metric + " [" + model_label(clap, lalm) + "]";
}

std::size_t label_width(const EvaluationResults& results) {
  std::size_t w = 34;
  for (const auto& m : results.accuracies)
    w = std::max(w, metric_label(m.metric, m.clap_model_id, m.lalm_model_id).size() + 2);
  for (const auto& c : results.correlations)
    w = std::max(w, metric_label(c.metric, c.clap_model_id, c.lalm_model_id).size() + 2);
  for (const auto& t : results.ties) w = std::max(w, t.model_id.size() + 2);
  return w;
}

void render_accuracy_rows(std::ostringstream& os, const std::string& label, const AccuracyReport& r,
                          std::size_t width) {
  auto row = [&](const SubsetAccuracy& s) {
    os << pad(label, width) << pad(s.subset, 22);
    for (auto type : kAllPairTypes) os << pad(cell(s.per_type.at(type)), 9);
    os << cell(s.total) << "  (n=" << s.total.total << ", ties=" << s.total.ties << ")\n";
  };
  for (const auto& s : r.subsets) row(s);
  if (r.subsets.size() > 1) row(r.overall);
}

}  // namespace

Json to_json(const AccuracyReport& r) {
  Json subsets = Json::array();
  for (const auto& s : r.subsets) subsets.push_back(to_json(s));
  return {{"subsets", subsets}, {"overall", to_json(r.overall)}};
}

Json to_json(const TieReport& r) {
  Json hist = Json::array();
  for (const auto& [v, c] : r.tie_value_histogram) hist.push_back({{"value", v}, {"count", c}});
  return {{"model_id", r.model_id},         {"tie_count", r.tie_count},
          {"pair_count", r.pair_count},     {"excluded_count", r.excluded_count},
          {"tie_rate", r.tie_rate},         {"tie_value_histogram", hist}};
}

Json to_json(const CorrelationReport& r) {
  return {{"lcc", r.lcc}, {"srcc", r.srcc}, {"ktau", r.ktau}, {"n", r.n}};
}

std::string render_report_text(const EvaluationResults& results) {
  std::ostringstream os;
  os << "CAF-Score evaluation report\n";
  os << "config: " << canonical_dump(results.fingerprint) << "\n";
  const std::size_t width = label_width(results);

  if (!results.accuracies.empty()) {
    os << "\n== Pairwise preference accuracy (%) ==\n";
    os << pad("metric", width) << pad("subset", 22) << pad("HH", 9) << pad("HM", 9) << pad("MM", 9)
       << "Total\n";
    for (const auto& m : results.accuracies)
      render_accuracy_rows(os, metric_label(m.metric, m.clap_model_id, m.lalm_model_id), m.report, width);
  }

  if (!results.correlations.empty()) {
    os << "\n== Correlation with human ratings ==\n";
    os << pad("metric", width) << pad("n", 8) << pad("LCC", 10) << pad("SRCC", 10) << "KTAU\n";
    for (const auto& c : results.correlations) {
      os << pad(metric_label(c.metric, c.clap_model_id, c.lalm_model_id), width)
         << pad(std::to_string(c.report.n), 8) << pad(fixed(c.report.lcc, 3), 10)
         << pad(fixed(c.report.srcc, 3), 10) << fixed(c.report.ktau, 3) << "\n";
    }
  }

  for (const auto& s : results.sweeps) {
    os << "\n== Alpha sweep [" << model_label(s.clap_model_id, s.lalm_model_id) << "] ==\n";
    os << pad("alpha", 10) << "overall\n";
    for (const auto& p : s.result.points) os << pad(format_double(p.alpha), 10) << fixed(p.overall_accuracy) << "\n";
    os << "best fixed alpha: " << format_double(s.result.best_alpha) << " ("
       << fixed(s.result.best_accuracy) << ")\n";
    os << "adaptive alpha:   "
       << (s.result.adaptive_accuracy ? fixed(*s.result.adaptive_accuracy) : std::string("n/a")) << "\n";
  }

  for (const auto& a : results.ablations) {
    os << "\n== Pooling ablation, alpha " << format_double(a.alpha) << " ["
       << model_label(a.clap_model_id, a.lalm_model_id) << "] ==\n";
    for (const auto& row : a.rows) render_accuracy_rows(os, std::string(to_string(row.strategy)), row.report, width);
  }

  if (!results.ties.empty()) {
    os << "\n== Raw-score tie rates ==\n";
    for (const auto& t : results.ties) {
      os << pad(t.model_id, width) << "ties " << t.tie_count << "/" << t.pair_count << " = "
         << fixed(100.0 * t.tie_rate) << "%";
      if (t.excluded_count > 0) os << "  (excluded " << t.excluded_count << ")";
      os << "\n";
      for (const auto& [v, c] : t.tie_value_histogram) {
        const double share = t.tie_count > 0 ? 100.0 * c / t.tie_count : 0.0;
        os << "    value " << pad(format_double(v), 8) << c << " (" << fixed(share, 1) << "% of ties)\n";
      }
    }
  }
  return os.str();
}

std::vector<std::filesystem::path> emit_report(const EvaluationResults& results,
                                               const std::filesystem::path& out_dir) {
  if (results.empty()) throw EvaluationError("emit_report: no results to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& bytes) {
    const auto path = out_dir / name;
    write_file(path, bytes);
    written.push_back(path);
  };

  emit("report.txt", render_report_text(results));

  std::string jsonl;
  auto record = [&](Json j) {
    j["config"] = results.fingerprint;
    jsonl += j.dump() + "\n";
  };
  for (const auto& m : results.accuracies)
    record({{"kind", "accuracy"}, {"metric", m.metric}, {"clap_model_id", m.clap_model_id},
            {"lalm_model_id", m.lalm_model_id}, {"report", to_json(m.report)}});
  for (const auto& c : results.correlations)
    record({{"kind", "correlation"}, {"metric", c.metric}, {"clap_model_id", c.clap_model_id},
            {"lalm_model_id", c.lalm_model_id}, {"report", to_json(c.report)}});
  for (const auto& s : results.sweeps) {
    Json points = Json::array();
    for (const auto& p : s.result.points) points.push_back({{"alpha", p.alpha}, {"overall_accuracy", p.overall_accuracy}});
    Json j{{"kind", "alpha_sweep"}, {"clap_model_id", s.clap_model_id}, {"lalm_model_id", s.lalm_model_id},
           {"points", points}, {"best_alpha", s.result.best_alpha}, {"best_accuracy", s.result.best_accuracy}};
    if (s.result.adaptive_accuracy) j["adaptive_accuracy"] = *s.result.adaptive_accuracy;
    record(std::move(j));
  }
  for (const auto& a : results.ablations) {
    Json rows = Json::array();
    for (const auto& row : a.rows) rows.push_back({{"pooling", to_string(row.strategy)}, {"report", to_json(row.report)}});
    record({{"kind", "pooling_ablation"}, {"clap_model_id", a.clap_model_id},
            {"lalm_model_id", a.lalm_model_id}, {"alpha", a.alpha}, {"rows", rows}});
  }
  for (const auto& t : results.ties) {
    Json j = to_json(t);
    j["kind"] = "tie_report";
    record(std::move(j));
  }
  emit("results.jsonl", jsonl);

  if (!results.sweeps.empty()) {
    emit("sweep.csv", sweep_csv(results.sweeps.front().result));
    if (results.sweeps.size() > 1) {
      for (const auto& s : results.sweeps)
        emit("sweep__" + sanitize(s.clap_model_id) + "__" + sanitize(s.lalm_model_id) + ".csv", sweep_csv(s.result));
    }
  }

  if (!results.ties.empty()) {
    std::string csv = "model_id,tie_count,pair_count,tie_rate,value,count\n";
    for (const auto& t : results.ties) {
      const std::string prefix = t.model_id + "," + std::to_string(t.tie_count) + "," +
                                 std::to_string(t.pair_count) + "," + format_double(t.tie_rate) + ",";
      if (t.tie_value_histogram.empty()) csv += prefix + ",0\n";
      for (const auto& [v, c] : t.tie_value_histogram) csv += prefix + format_double(v) + "," + std::to_string(c) + "\n";
    }
    emit("ties.csv", csv);
  }
  return written;
}

}  // namespace cafscore
