// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cafscore/errors.hpp"
#include "cafscore/report.hpp"
#include "fakes.hpp"

using namespace cafscore;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AccuracyReport report_with(double accuracy) {
  SubsetAccuracy s;
  s.subset = "Main";
  for (auto t : kAllPairTypes) s.per_type[t] = Tally{1, 0, 2, 50.0};
  s.total = Tally{3, 0, 6, accuracy};
  s.total_accuracy = accuracy;
  AccuracyReport r;
  r.subsets = {s};
  r.overall = s;
  r.overall.subset = "overall";
  return r;
}

EvaluationResults sample() {
  EvaluationResults res;
  res.fingerprint = {{"alpha", 0.8}, {"tie_policy", "zero"}};
  res.accuracies.push_back({"fleur", "", "lalm", report_with(62.5)});
  SweepResult sweep;
  sweep.points = {{0.0, 50.0}, {0.5, 62.5}, {1.0, 55.0}};
  sweep.best_alpha = 0.5;
  sweep.best_accuracy = 62.5;
  res.sweeps.push_back({"clap", "lalm", sweep});
  TieReport ties;
  ties.model_id = "lalm";
  ties.tie_count = 2;
  ties.pair_count = 4;
  ties.tie_rate = 0.5;
  ties.tie_value_histogram = {{0.8, 2}};
  res.ties.push_back(ties);
  return res;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("emits all files deterministically") {
    fake::TempDir a, b;
    const auto files = emit_report(sample(), a.path());
    emit_report(sample(), b.path());
    CHECK(files.size() == 4);
    for (const char* name : {"report.txt", "results.jsonl", "sweep.csv", "ties.csv"}) {
      REQUIRE(std::filesystem::exists(a / name));
      CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(slurp(a / "sweep.csv") == "alpha,overall_accuracy\n0,50\n0.5,62.5\n1,55\n");
    const auto ties = slurp(a / "ties.csv");
    CHECK(ties.starts_with("model_id,tie_count,pair_count,tie_rate,value,count\n"));
    CHECK(ties.find("lalm,2,4,0.5,0.8,2") != std::string::npos);
    const auto text = slurp(a / "report.txt");
    CHECK(text == render_report_text(sample()));
    CHECK(text.find("62.50") != std::string::npos);
    CHECK(text.find("best fixed alpha: 0.5") != std::string::npos);

    std::istringstream lines(slurp(a / "results.jsonl"));
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
      const auto j = Json::parse(line);
      CHECK(j["config"]["alpha"] == 0.8);
      ++n;
    }
    CHECK(n == 3);
  }

  TEST_CASE("errors") {
    fake::TempDir dir;
    CHECK_THROWS_AS(emit_report(EvaluationResults{}, dir.path()), EvaluationError);
    {
      std::ofstream blocker(dir / "file");
      blocker << "x";
    }
    CHECK_THROWS_AS(emit_report(sample(), dir / "file" / "sub"), IoError);
  }
}
