// SPDX-License-Identifier: Apache-2.0
#include "cafscore/commands.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cafscore/canonical.hpp"
#include "cafscore/errors.hpp"
#include "cafscore/fusion.hpp"
#include "cafscore/harness.hpp"
#include "cafscore/records.hpp"
#include "cafscore/report.hpp"
#include "cafscore/scoring.hpp"
#include "cafscore/stats.hpp"

namespace cafscore::cli {
namespace {

namespace fs = std::filesystem;

// Ranks unparseable raw outputs below every parsed score.
constexpr double kUnparsedRaw = -1.0;

struct Engine {
  std::shared_ptr<Cache> cache;
  std::unique_ptr<Scorer> scorer;
};

struct Combo {
  std::string clap;
  std::string lalm;
};

ScoringOptions scoring_options(const RunConfig& cfg) {
  ScoringOptions o;
  o.pooling = cfg.fusion.pooling;
  o.fixed_alpha = cfg.fusion.alpha;
  o.alpha_grid = cfg.fusion.alpha_grid;
  o.entropy_mode = cfg.entropy_mode;
  return o;
}

Engine build_engine(const RunConfig& cfg, Runtime& rt, bool with_clap, bool with_lalm) {
  Engine e;
  e.cache = std::make_shared<Cache>(cfg.cache_dir.value_or(Cache::default_root()));
  auto fetcher_for = [&](const std::string& model_id, const std::string& backend_id, int top_k) {
    BackendSpec spec = cfg.backends.at(backend_id);
    spec.model_id = model_id;
    return std::make_shared<Fetcher>(model_id, rt.make_backend(spec), e.cache, spec.max_parallel, top_k);
  };
  std::vector<ClapModel> clap;
  if (with_clap) {
    for (const auto& [id, m] : cfg.clap_models)
      clap.push_back(ClapModel{id, m.windowing, fetcher_for(id, m.backend, kDefaultTopLogprobs)});
  }
  std::vector<LalmModel> lalm;
  if (with_lalm) {
    for (const auto& [id, m] : cfg.lalm_models)
      lalm.push_back(LalmModel{id, m.prompt, fetcher_for(id, m.backend, m.top_logprobs)});
  }
  e.scorer = std::make_unique<Scorer>(std::move(clap), std::move(lalm), scoring_options(cfg));
  return e;
}

std::vector<Combo> combos_of(const Scorer& s) {
  std::vector<Combo> out;
  if (s.clap_models().empty()) {
    for (const auto& l : s.lalm_models()) out.push_back({"", l.id});
  } else if (s.lalm_models().empty()) {
    for (const auto& c : s.clap_models()) out.push_back({c.id, ""});
  } else {
    for (const auto& c : s.clap_models())
      for (const auto& l : s.lalm_models()) out.push_back({c.id, l.id});
  }
  return out;
}

std::string root_message(const std::exception& e) {
  std::string msg = e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    (void)inner;  // StageError already embeds the inner message.
  }
  return msg;
}

struct CaptionJob {
  AudioClipRef audio;
  CaptionCandidate caption;
};

struct ScoredSet {
  /// Per job: one bundle per combo, or nothing when scoring failed.
  std::vector<std::optional<std::vector<ScoreBundle>>> bundles;
  std::vector<std::string> failures;
  std::exception_ptr first_error;
  std::set<std::pair<std::string, std::string>> failed_keys;
};

ScoredSet score_jobs(const Scorer& scorer, const std::vector<CaptionJob>& jobs, int workers) {
  ScoredSet set;
  set.bundles.resize(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  parallel_for(jobs.size(), static_cast<std::size_t>(workers), [&](std::size_t i) {
    try {
      set.bundles[i] = scorer.score(jobs[i].audio, jobs[i].caption);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!errors[i]) continue;
    if (!set.first_error) set.first_error = errors[i];
    set.failed_keys.insert({jobs[i].audio.id, jobs[i].caption.id});
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      set.failures.push_back(jobs[i].audio.id + "/" + jobs[i].caption.id + ": " + root_message(e));
    }
  }
  return set;
}

void add_job(std::vector<CaptionJob>& jobs, std::set<std::pair<std::string, std::string>>& seen,
             const AudioClipRef& audio, const CaptionCandidate& caption) {
  if (seen.insert({audio.id, caption.id}).second) jobs.push_back({audio, caption});
}

std::string file_digest(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "unreadable";
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Json fingerprint(const RunConfig& cfg, std::string_view command) {
  Json clap = Json::object();
  for (const auto& [id, m] : cfg.clap_models)
    clap[id] = {{"window_len_s", m.windowing.window_len_s}, {"hop_s", m.windowing.hop_s}};
  Json lalm = Json::object();
  for (const auto& [id, m] : cfg.lalm_models)
    lalm[id] = {{"prompt", to_string(m.prompt)}, {"top_logprobs", m.top_logprobs}};
  // Content hash of file-backed inputs stands in for the cache state.
  std::string inputs;
  for (const auto& [id, spec] : cfg.backends) {
    if (spec.kind != BackendSpec::Kind::file) continue;
    for (const auto& p : spec.paths) inputs += id + ":" + file_digest(p) + ";";
  }
  Json grid = Json::array();
  for (double a : cfg.fusion.alpha_grid) grid.push_back(a);
  return {{"command", command},
          {"clap_models", clap},
          {"lalm_models", lalm},
          {"alpha", cfg.fusion.alpha ? Json(*cfg.fusion.alpha) : Json("adaptive")},
          {"pooling", to_string(cfg.fusion.pooling)},
          {"alpha_grid", grid},
          {"prompt_version", kPromptTemplateVersion},
          {"tie_policy", to_string(cfg.tie_policy)},
          {"entropy_mode", to_string(cfg.entropy_mode)},
          {"dataset_sha256", file_digest(cfg.dataset_path)},
          {"inputs_sha256", sha256_hex(inputs)}};
}

void write_bundles(const fs::path& out_dir, const ScoredSet& set) {
  std::string bytes;
  for (const auto& per_job : set.bundles) {
    if (!per_job) continue;
    for (const auto& b : *per_job) bytes += encode_record_line(b) + "\n";
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::ofstream out(out_dir / "scores.jsonl", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError((out_dir / "scores.jsonl").string() + ": cannot open for writing");
  out << bytes;
}

/// Bundles of one combo across all successfully scored jobs.
std::vector<ScoreBundle> combo_bundles(const ScoredSet& set, std::size_t combo) {
  std::vector<ScoreBundle> out;
  for (const auto& per_job : set.bundles) {
    if (per_job) out.push_back((*per_job)[combo]);
  }
  return out;
}

std::optional<double> raw_or_floor(const ScoreBundle& b) {
  if (b.lalm_model_id.empty()) return std::nullopt;
  return b.raw.value_or(kUnparsedRaw);
}

BundleMetric caf_metric(const RunConfig& cfg) {
  const AlphaPolicy policy = cfg.fusion.alpha ? AlphaPolicy::fixed(*cfg.fusion.alpha) : AlphaPolicy::adaptive();
  return [policy](const ScoreBundle& b) -> std::optional<double> {
    auto s = b.s_clap();
    if (!s || !b.fleur) return std::nullopt;
    if (policy.is_adaptive() && !b.entropy) return std::nullopt;
    return caf_score(*s, *b.fleur, resolve_alpha(policy, b.entropy));
  };
}

std::string caf_label(const RunConfig& cfg) {
  return "caf@" + (cfg.fusion.alpha ? format_double(*cfg.fusion.alpha) : std::string("adaptive"));
}

struct PreferenceRun {
  std::vector<PreferenceItem> items;  // only fully scored items
  std::vector<Combo> combos;
  ScoredSet set;
  std::size_t dropped = 0;
};

std::vector<PreferenceItem> load_preferences(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) throw ConfigError("dataset.path is not set");
  auto items = load_preference_dataset(cfg.dataset_path);
  if (items.empty()) throw LoadError(cfg.dataset_path.string() + ": dataset is empty");
  return items;
}

PreferenceRun run_preferences(const RunConfig& cfg, std::vector<PreferenceItem> items, Runtime& rt,
                              bool with_clap, bool with_lalm) {
  Engine engine = build_engine(cfg, rt, with_clap, with_lalm);
  std::vector<CaptionJob> jobs;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& it : items) {
    add_job(jobs, seen, it.audio, it.caption_a);
    add_job(jobs, seen, it.audio, it.caption_b);
  }
  PreferenceRun run;
  run.combos = combos_of(*engine.scorer);
  run.set = score_jobs(*engine.scorer, jobs, cfg.workers);
  for (auto& it : items) {
    if (run.set.failed_keys.contains({it.audio.id, it.caption_a.id}) ||
        run.set.failed_keys.contains({it.audio.id, it.caption_b.id})) {
      ++run.dropped;
      continue;
    }
    run.items.push_back(std::move(it));
  }
  for (const auto& f : run.set.failures) *rt.err << "unscored: " << f << "\n";
  if (run.items.empty()) {
    if (run.set.first_error) std::rethrow_exception(run.set.first_error);
    throw EvaluationError("no items could be scored");
  }
  return run;
}

int finish(const ScoredSet& set, std::size_t dropped, Runtime& rt) {
  if (set.failures.empty()) return kExitOk;
  *rt.err << set.failures.size() << " caption(s) unscored; " << dropped << " item(s) left out of the report\n";
  return kExitPartial;
}

void announce(Runtime& rt, const std::vector<fs::path>& written) {
  for (const auto& p : written) *rt.out << "wrote " << p.string() << "\n";
}

std::vector<TieReport> lalm_ties(const PreferenceRun& run) {
  std::vector<TieReport> out;
  std::set<std::string> done;
  for (std::size_t c = 0; c < run.combos.size(); ++c) {
    const std::string& lalm = run.combos[c].lalm;
    if (lalm.empty() || !done.insert(lalm).second) continue;
    const auto bundles = combo_bundles(run.set, c);
    const BundleIndex index(bundles);
    std::unordered_map<std::string, OptionalPair> raw, fleur;
    for (const auto& item : run.items) {
      const auto* a = index.find(item.audio.id, item.caption_a.id);
      const auto* b = index.find(item.audio.id, item.caption_b.id);
      raw[item.key()] = {a->raw, b->raw};
      fleur[item.key()] = {a->fleur, b->fleur};
    }
    out.push_back(tie_report(lalm, run.items, raw));
    out.push_back(tie_report(lalm + ":fleur", run.items, fleur));
  }
  return out;
}

int evaluate_preferences(const RunConfig& cfg, std::vector<PreferenceItem> items, Runtime& rt) {
  PreferenceRun run = run_preferences(cfg, std::move(items), rt, true, true);
  EvaluationResults results;
  results.fingerprint = fingerprint(cfg, "evaluate");

  std::set<std::string> clap_done, lalm_done;
  for (std::size_t c = 0; c < run.combos.size(); ++c) {
    const auto& combo = run.combos[c];
    const auto bundles = combo_bundles(run.set, c);
    const BundleIndex index(bundles);
    auto accuracy = [&](const std::string& metric, const std::string& clap, const std::string& lalm,
                        const BundleMetric& fn) {
      results.accuracies.push_back(
          {metric, clap, lalm, pairwise_accuracy(run.items, pair_scores(run.items, index, fn), cfg.tie_policy)});
    };
    if (!combo.clap.empty() && clap_done.insert(combo.clap).second)
      accuracy("s_clap:" + std::string(to_string(cfg.fusion.pooling)), combo.clap, "",
               [](const ScoreBundle& b) { return b.s_clap(); });
    if (!combo.lalm.empty() && lalm_done.insert(combo.lalm).second) {
      accuracy("raw", "", combo.lalm, raw_or_floor);
      accuracy("fleur", "", combo.lalm, [](const ScoreBundle& b) { return b.fleur; });
    }
    if (!combo.clap.empty() && !combo.lalm.empty()) {
      accuracy(caf_label(cfg), combo.clap, combo.lalm, caf_metric(cfg));
      if (cfg.fusion.alpha) {
        results.ablations.push_back({combo.clap, combo.lalm, *cfg.fusion.alpha,
                                     pooling_ablation(bundles, run.items, *cfg.fusion.alpha, cfg.tie_policy)});
      }
    }
  }
  results.ties = lalm_ties(run);

  announce(rt, emit_report(results, cfg.output_dir));
  write_bundles(cfg.output_dir, run.set);
  *rt.out << render_report_text(results);
  return finish(run.set, run.dropped, rt);
}

int evaluate_ratings(const RunConfig& cfg, Runtime& rt) {
  if (cfg.dataset_path.empty()) throw ConfigError("dataset.path is not set");
  auto items = load_rating_dataset(cfg.dataset_path);
  if (items.size() < 2) throw LoadError(cfg.dataset_path.string() + ": need at least two rating items");

  Engine engine = build_engine(cfg, rt, true, true);
  std::vector<CaptionJob> jobs;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& it : items) add_job(jobs, seen, it.audio, it.caption);
  const auto combos = combos_of(*engine.scorer);
  ScoredSet set = score_jobs(*engine.scorer, jobs, cfg.workers);
  for (const auto& f : set.failures) *rt.err << "unscored: " << f << "\n";

  std::vector<RatingItem> scored;
  for (auto& it : items) {
    if (!set.failed_keys.contains({it.audio.id, it.caption.id})) scored.push_back(std::move(it));
  }
  if (scored.size() < 2) {
    if (set.first_error) std::rethrow_exception(set.first_error);
    throw EvaluationError("fewer than two rating items could be scored");
  }

  EvaluationResults results;
  results.fingerprint = fingerprint(cfg, "evaluate");
  std::set<std::string> clap_done, lalm_done;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const auto bundles = combo_bundles(set, c);
    const BundleIndex index(bundles);
    auto correlation = [&](const std::string& metric, const std::string& clap, const std::string& lalm,
                           const BundleMetric& fn) {
      std::vector<double> xs, ys;
      for (const auto& it : scored) {
        const auto* b = index.find(it.audio.id, it.caption.id);
        auto v = b ? fn(*b) : std::nullopt;
        if (!v) continue;
        xs.push_back(*v);
        ys.push_back(it.human_rating);
      }
      try {
        results.correlations.push_back({metric, clap, lalm, correlate(xs, ys)});
      } catch (const UndefinedCorrelation& e) {
        throw UndefinedCorrelation(metric + " [" + clap + lalm + "]: " + e.what());
      }
    };
    if (!combos[c].clap.empty() && clap_done.insert(combos[c].clap).second)
      correlation("s_clap:" + std::string(to_string(cfg.fusion.pooling)), combos[c].clap, "",
                  [](const ScoreBundle& b) { return b.s_clap(); });
    if (!combos[c].lalm.empty() && lalm_done.insert(combos[c].lalm).second)
      correlation("fleur", "", combos[c].lalm, [](const ScoreBundle& b) { return b.fleur; });
    if (!combos[c].clap.empty() && !combos[c].lalm.empty())
      correlation(caf_label(cfg), combos[c].clap, combos[c].lalm, caf_metric(cfg));
  }

  announce(rt, emit_report(results, cfg.output_dir));
  write_bundles(cfg.output_dir, set);
  *rt.out << render_report_text(results);
  if (!set.failures.empty()) return kExitPartial;
  return kExitOk;
}

int dry_run_summary(const RunConfig& cfg, Runtime& rt) {
  std::size_t n = 0;
  if (cfg.dataset_kind == DatasetKind::preference) n = load_preferences(cfg).size();
  else n = load_rating_dataset(cfg.dataset_path).size();
  *rt.out << "config ok: " << cfg.clap_models.size() << " CLAP model(s), " << cfg.lalm_models.size()
          << " LALM model(s), " << cfg.backends.size() << " backend(s)\n"
          << "dataset ok: " << n << " item(s) in " << cfg.dataset_path.string() << "\n";
  return kExitOk;
}

}  // namespace

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.dataset) cfg.dataset_path = *o.dataset;
  if (o.out) cfg.output_dir = *o.out;
  if (o.cache) cfg.cache_dir = *o.cache;
  if (o.alpha) cfg.fusion.alpha = parse_alpha_setting(*o.alpha);
  try {
    if (o.pooling) cfg.fusion.pooling = parse_pooling(*o.pooling);
    if (o.tie_policy) cfg.tie_policy = parse_tie_policy(*o.tie_policy);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

int cmd_score(const RunConfig& cfg, const ScoreRequest& req, bool dry_run, Runtime& rt) {
  check_run_config(cfg);
  AudioClipRef audio{req.audio_id, req.duration_s, "cli", Json::object()};
  CaptionCandidate caption{req.caption_id, req.caption, CaptionOrigin::unknown, Json::object()};
  if (audio.id.empty() || !(audio.duration_s > 0.0)) throw LoadError("score: --audio-id and a positive --duration are required");
  if (caption.text.find_first_not_of(" \t\r\n") == std::string::npos) throw LoadError("score: --caption must be nonempty");
  if (dry_run) {
    *rt.out << "config ok\n";
    return kExitOk;
  }
  Engine engine = build_engine(cfg, rt, true, true);
  const auto bundles = engine.scorer->score(audio, caption);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  std::ofstream log(cfg.output_dir / "scores.jsonl", std::ios::binary | std::ios::app);
  if (!log) throw IoError((cfg.output_dir / "scores.jsonl").string() + ": cannot open for appending");
  for (const auto& b : bundles) {
    const std::string line = encode_record_line(b);
    *rt.out << line << "\n";
    log << line << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, bool dry_run, Runtime& rt) {
  check_run_config(cfg);
  if (dry_run) return dry_run_summary(cfg, rt);
  if (cfg.dataset_kind == DatasetKind::rating) return evaluate_ratings(cfg, rt);
  return evaluate_preferences(cfg, load_preferences(cfg), rt);
}

int cmd_sweep_alpha(const RunConfig& cfg, bool dry_run, Runtime& rt) {
  check_run_config(cfg);
  if (cfg.clap_models.empty() || cfg.lalm_models.empty())
    throw ConfigError("sweep-alpha needs at least one CLAP and one LALM model");
  if (cfg.dataset_kind != DatasetKind::preference) throw ConfigError("sweep-alpha needs a preference dataset");
  if (dry_run) return dry_run_summary(cfg, rt);

  PreferenceRun run = run_preferences(cfg, load_preferences(cfg), rt, true, true);
  EvaluationResults results;
  results.fingerprint = fingerprint(cfg, "sweep-alpha");
  for (std::size_t c = 0; c < run.combos.size(); ++c) {
    const auto bundles = combo_bundles(run.set, c);
    results.sweeps.push_back({run.combos[c].clap, run.combos[c].lalm,
                              alpha_sweep(bundles, run.items, cfg.fusion.alpha_grid, cfg.tie_policy)});
  }
  announce(rt, emit_report(results, cfg.output_dir));
  *rt.out << render_report_text(results);
  return finish(run.set, run.dropped, rt);
}

int cmd_tie_report(const RunConfig& cfg, bool dry_run, Runtime& rt) {
  check_run_config(cfg);
  if (cfg.lalm_models.empty()) throw ConfigError("tie-report needs at least one LALM model");
  if (cfg.dataset_kind != DatasetKind::preference) throw ConfigError("tie-report needs a preference dataset");
  if (dry_run) return dry_run_summary(cfg, rt);

  PreferenceRun run = run_preferences(cfg, load_preferences(cfg), rt, false, true);
  EvaluationResults results;
  results.fingerprint = fingerprint(cfg, "tie-report");
  results.ties = lalm_ties(run);
  announce(rt, emit_report(results, cfg.output_dir));
  *rt.out << render_report_text(results);
  return finish(run.set, run.dropped, rt);
}

int cmd_cache_gc(const fs::path& cache_dir, std::uintmax_t max_bytes, Runtime& rt) {
  if (!fs::is_directory(cache_dir)) throw IoError(cache_dir.string() + ": cache directory does not exist");
  Cache cache(cache_dir);
  const GcSummary s = cache.gc(max_bytes);
  *rt.out << "cache " << cache_dir.string() << ": " << s.entries_before << " entries, " << s.bytes_before
          << " bytes; evicted " << s.evicted << ", now " << s.bytes_after << " bytes\n";
  return kExitOk;
}

int cmd_validate(const std::vector<fs::path>& files, Runtime& rt) {
  std::size_t bad = 0, total = 0;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw LoadError(f.string() + ": cannot open");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++total;
      ValidationResult r;
      try {
        r = validate_record(Json::parse(line));
      } catch (const Json::parse_error& e) {
        r.violations.push_back(std::string("malformed JSON: ") + e.what());
      }
      if (r.ok()) continue;
      ++bad;
      for (const auto& v : r.violations) *rt.out << f.string() << ":" << lineno << ": " << v << "\n";
    }
  }
  *rt.out << total << " record(s), " << bad << " invalid\n";
  return bad == 0 ? kExitOk : kExitData;
}

int exit_code_for(const std::exception& e) {
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    return exit_code_for(inner);
  }
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const BackendError*>(&e)) return kExitBackend;
  if (dynamic_cast<const LoadError*>(&e) || dynamic_cast<const EvaluationError*>(&e) ||
      dynamic_cast<const ExtractionError*>(&e) || dynamic_cast<const DomainError*>(&e))
    return kExitData;
  if (dynamic_cast<const IoError*>(&e)) return kExitData;
  return kExitBackend;
}

int guarded(Runtime& rt, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    *rt.err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace cafscore::cli
