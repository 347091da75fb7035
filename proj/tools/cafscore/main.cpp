// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include "cafscore/commands.hpp"
#include "cafscore/errors.hpp"
#include "cafscore/fleur.hpp"

namespace {

using namespace cafscore;
using namespace cafscore::cli;

template <class T>
void set_if(const CLI::Option* opt, std::optional<T>& dst, const T& value) {
  if (opt->count() > 0) dst = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cafscore: reference-free audio caption evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, dataset, out, alpha, pooling, tie_policy, cache_dir;
  bool dry_run = false;
  auto* o_config = app.add_option("--config", config_path, "Run configuration (YAML)");
  auto* o_dataset = app.add_option("--dataset", dataset, "Dataset JSONL, overrides the config");
  auto* o_out = app.add_option("--out", out, "Output directory, overrides the config");
  auto* o_alpha = app.add_option("--alpha", alpha, "Fusion weight in [0,1] or 'adaptive'");
  auto* o_pooling = app.add_option("--pooling", pooling, "S-CLAP pooling: max|avg|none");
  auto* o_tie = app.add_option("--tie-policy", tie_policy, "Tie credit: zero|half");
  auto* o_cache = app.add_option("--cache", cache_dir, "Cache directory");
  app.add_flag("--dry-run", dry_run, "Validate config and dataset without backend calls");

  auto* score = app.add_subcommand("score", "Score one caption against one clip");
  ScoreRequest req;
  score->add_option("--audio-id", req.audio_id, "Audio clip id")->required();
  score->add_option("--duration", req.duration_s, "Clip duration in seconds")->required();
  score->add_option("--caption", req.caption, "Caption text")->required();
  score->add_option("--caption-id", req.caption_id, "Caption id used for cache and backend lookups");

  auto* evaluate = app.add_subcommand("evaluate", "Score a benchmark and write reports");
  auto* sweep = app.add_subcommand("sweep-alpha", "Fusion accuracy over the alpha grid");
  auto* ties = app.add_subcommand("tie-report", "Tie rates of raw LALM scores");

  auto* validate = app.add_subcommand("validate", "Check JSONL interchange records");
  std::vector<std::string> files;
  validate->add_option("files", files, "JSONL files")->required();

  auto* gc = app.add_subcommand("cache-gc", "Evict least recently used cache entries");
  std::uintmax_t max_bytes = 0;
  gc->add_option("--max-bytes", max_bytes, "Size budget in bytes")->required();

  auto* prompt = app.add_subcommand("prompt", "Print the LALM prompt for a caption");
  std::string prompt_kind = "caption", prompt_caption;
  prompt->add_option("--kind", prompt_kind, "caption|tta");
  prompt->add_option("--caption", prompt_caption, "Caption text")->required();

  CLI11_PARSE(app, argc, argv);

  Runtime rt;
  return guarded(rt, [&]() -> int {
    if (*validate) {
      std::vector<std::filesystem::path> paths(files.begin(), files.end());
      return cmd_validate(paths, rt);
    }
    if (*gc) {
      std::filesystem::path dir = o_cache->count() ? std::filesystem::path(cache_dir) : Cache::default_root();
      return cmd_cache_gc(dir, max_bytes, rt);
    }
    if (*prompt) {
      PromptKind kind;
      try {
        kind = parse_prompt_kind(prompt_kind);
      } catch (const DomainError& e) {
        throw ConfigError(e.what());
      }
      *rt.out << build_prompt(kind, prompt_caption) << "\n";
      return kExitOk;
    }

    if (o_config->count() == 0) throw ConfigError("--config is required for this command");
    RunConfig cfg = load_run_config(config_path);
    Overrides ov;
    set_if(o_dataset, ov.dataset, std::filesystem::path(dataset));
    set_if(o_out, ov.out, std::filesystem::path(out));
    set_if(o_cache, ov.cache, std::filesystem::path(cache_dir));
    set_if(o_alpha, ov.alpha, alpha);
    set_if(o_pooling, ov.pooling, pooling);
    set_if(o_tie, ov.tie_policy, tie_policy);
    apply_overrides(cfg, ov);

    if (*score) return cmd_score(cfg, req, dry_run, rt);
    if (*evaluate) return cmd_evaluate(cfg, dry_run, rt);
    if (*sweep) return cmd_sweep_alpha(cfg, dry_run, rt);
    if (*ties) return cmd_tie_report(cfg, dry_run, rt);
    return kExitConfig;
  });
}
