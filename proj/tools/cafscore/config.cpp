// SPDX-License-Identifier: Apache-2.0
#include "cafscore/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cafscore/errors.hpp"

namespace cafscore::cli {
namespace {

namespace fs = std::filesystem;

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& where) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": invalid value");
  }
}

template <typename T>
T get_or(const YAML::Node& parent, const char* key, T fallback, const std::string& where) {
  const YAML::Node n = parent[key];
  if (!n || n.IsNull()) return fallback;
  return scalar<T>(n, where + "." + key);
}

template <typename Parse>
auto parse_enum(const std::string& value, const std::string& where, Parse parse) {
  try {
    return parse(value);
  } catch (const DomainError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

BackendSpec parse_backend(const YAML::Node& node, const std::string& where, const fs::path& base) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  BackendSpec spec;
  const auto kind = get_or<std::string>(node, "kind", "file", where);
  if (kind == "file") {
    spec.kind = BackendSpec::Kind::file;
    const YAML::Node paths = node["paths"];
    if (paths && paths.IsSequence()) {
      for (const auto& p : paths) spec.paths.push_back(resolve(base, scalar<std::string>(p, where + ".paths")));
    } else if (node["path"]) {
      spec.paths.push_back(resolve(base, scalar<std::string>(node["path"], where + ".path")));
    }
  } else if (kind == "http") {
    spec.kind = BackendSpec::Kind::http;
    spec.base_url = get_or<std::string>(node, "base_url", "", where);
    if (node["auth_env"]) {
      const auto var = scalar<std::string>(node["auth_env"], where + ".auth_env");
      if (const char* token = env(var.c_str())) spec.auth_token = token;
    }
  } else {
    throw ConfigError(where + ".kind: expected 'file' or 'http', got '" + kind + "'");
  }
  spec.timeout_s = get_or<double>(node, "timeout_s", 60.0, where);
  spec.max_parallel = get_or<int>(node, "max_parallel", 4, where);
  spec.retries = get_or<int>(node, "retries", 3, where);
  return spec;
}

}  // namespace

std::optional<double> parse_alpha_setting(const std::string& s) {
  if (s == "adaptive") return std::nullopt;
  double v = 0.0;
  try {
    std::size_t used = 0;
    v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ConfigError("alpha: expected a number in [0, 1] or 'adaptive', got '" + s + "'");
  }
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("alpha: " + s + " is outside [0, 1]");
  return v;
}

RunConfig parse_run_config(const std::string& yaml_text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");

  RunConfig cfg;
  if (const auto backends = root["backends"]) {
    if (!backends.IsMap()) throw ConfigError("backends: expected a mapping");
    for (const auto& kv : backends) {
      const auto id = kv.first.as<std::string>();
      cfg.backends[id] = parse_backend(kv.second, "backends." + id, base_dir);
    }
  }
  if (const auto models = root["clap_models"]) {
    if (!models.IsMap()) throw ConfigError("clap_models: expected a mapping");
    for (const auto& kv : models) {
      const auto id = kv.first.as<std::string>();
      const std::string where = "clap_models." + id;
      ClapModelConfig m;
      m.windowing = default_windowing_for(id);
      m.windowing.window_len_s = get_or<double>(kv.second, "window_len_s", m.windowing.window_len_s, where);
      m.windowing.hop_s = get_or<double>(kv.second, "hop_s", m.windowing.hop_s, where);
      m.backend = get_or<std::string>(kv.second, "backend", "", where);
      if (!(m.windowing.window_len_s > 0.0) || !(m.windowing.hop_s > 0.0))
        throw ConfigError(where + ": window_len_s and hop_s must be positive");
      cfg.clap_models[id] = m;
    }
  }
  if (const auto models = root["lalm_models"]) {
    if (!models.IsMap()) throw ConfigError("lalm_models: expected a mapping");
    for (const auto& kv : models) {
      const auto id = kv.first.as<std::string>();
      const std::string where = "lalm_models." + id;
      LalmModelConfig m;
      m.backend = get_or<std::string>(kv.second, "backend", "", where);
      m.prompt = parse_enum(get_or<std::string>(kv.second, "prompt", "caption", where), where + ".prompt",
                            parse_prompt_kind);
      m.top_logprobs = get_or<int>(kv.second, "top_logprobs", kDefaultTopLogprobs, where);
      if (m.top_logprobs < 1) throw ConfigError(where + ".top_logprobs: must be positive");
      cfg.lalm_models[id] = m;
    }
  }
  if (const auto fusion = root["fusion"]) {
    if (fusion["alpha"]) cfg.fusion.alpha = parse_alpha_setting(scalar<std::string>(fusion["alpha"], "fusion.alpha"));
    if (fusion["pooling"])
      cfg.fusion.pooling = parse_enum(scalar<std::string>(fusion["pooling"], "fusion.pooling"), "fusion.pooling",
                                      parse_pooling);
    if (const auto grid = fusion["alpha_grid"]) {
      if (!grid.IsSequence()) throw ConfigError("fusion.alpha_grid: expected a list");
      cfg.fusion.alpha_grid.clear();
      for (const auto& a : grid) {
        const double v = scalar<double>(a, "fusion.alpha_grid");
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("fusion.alpha_grid: values must lie in [0, 1]");
        cfg.fusion.alpha_grid.push_back(v);
      }
    }
  }
  if (const auto ds = root["dataset"]) {
    if (ds["path"]) cfg.dataset_path = resolve(base_dir, scalar<std::string>(ds["path"], "dataset.path"));
    const auto kind = get_or<std::string>(ds, "kind", "preference", "dataset");
    if (kind == "preference") cfg.dataset_kind = DatasetKind::preference;
    else if (kind == "rating") cfg.dataset_kind = DatasetKind::rating;
    else throw ConfigError("dataset.kind: expected 'preference' or 'rating'");
  }
  if (root["tie_policy"])
    cfg.tie_policy = parse_enum(scalar<std::string>(root["tie_policy"], "tie_policy"), "tie_policy", parse_tie_policy);
  if (root["output_dir"]) cfg.output_dir = resolve(base_dir, scalar<std::string>(root["output_dir"], "output_dir"));
  if (root["entropy_mode"])
    cfg.entropy_mode = parse_enum(scalar<std::string>(root["entropy_mode"], "entropy_mode"), "entropy_mode",
                                  parse_entropy_mode);
  if (root["cache_dir"]) cfg.cache_dir = resolve(base_dir, scalar<std::string>(root["cache_dir"], "cache_dir"));
  cfg.workers = get_or<int>(root, "workers", cfg.workers, "config");
  if (cfg.workers < 1) throw ConfigError("workers: must be positive");

  if (const char* v = env("CAF_CACHE_DIR")) cfg.cache_dir = fs::path(v);
  if (const char* v = env("CAF_DATASET")) cfg.dataset_path = fs::path(v);
  if (const char* v = env("CAF_OUTPUT_DIR")) cfg.output_dir = fs::path(v);
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

void check_run_config(const RunConfig& cfg) {
  if (cfg.clap_models.empty() && cfg.lalm_models.empty())
    throw ConfigError("config: at least one of clap_models / lalm_models is required");
  auto check_ref = [&](const std::string& model, const std::string& backend) {
    if (backend.empty()) throw ConfigError(model + ": no backend given");
    auto it = cfg.backends.find(backend);
    if (it == cfg.backends.end()) throw ConfigError(model + ": unknown backend '" + backend + "'");
    BackendSpec spec = it->second;
    spec.model_id = model;
    if (auto problems = spec.problems(); !problems.empty())
      throw ConfigError("backends." + backend + ": " + problems.front());
  };
  for (const auto& [id, m] : cfg.clap_models) check_ref(id, m.backend);
  for (const auto& [id, m] : cfg.lalm_models) check_ref(id, m.backend);
}

}  // namespace cafscore::cli
