// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/config.hpp"

#include <charconv>
#include <cstdlib>
#include <set>

#include <toml.hpp>

#include "pseudoref/text.hpp"

namespace pseudoref::config {
namespace {

struct TomlKey {
  std::string_view table;
  std::string_view key;
  std::string_view setting;
  bool is_path;
};

constexpr TomlKey kTomlKeys[] = {
    {"dataset", "path", "dataset", true},
    {"dataset", "format", "format", false},
    {"scoring", "method", "method", false},
    {"scoring", "parallelism", "parallelism", false},
    {"scoring", "language_names", "language_names", false},
    {"backend", "id", "backend", false},
    {"backend", "model", "model", false},
    {"backend", "endpoint", "endpoint", false},
    {"backend", "temperature", "temperature", false},
    {"backend", "max_output_tokens", "max_output_tokens", false},
    {"backend", "timeout_s", "timeout_s", false},
    {"backend", "max_retries", "max_retries", false},
    {"backend", "lexicon", "lexicon", true},
    {"backend", "failure_rate", "failure_rate", false},
    {"embedder", "provider", "embedder", false},
    {"embedder", "model", "embed_model", false},
    {"embedder", "endpoint", "embed_endpoint", false},
    {"embedder", "expected_dim", "expected_dim", false},
    {"embedder", "batch_size", "batch_size", false},
    {"embedder", "timeout_s", "embed_timeout_s", false},
    {"embedder", "replay_from", "replay_from", false},
    {"paths", "cache_dir", "cache_dir", true},
    {"paths", "out", "out", true},
    {"paths", "generation_prompt", "generation_prompt", true},
    {"paths", "direct_prompt", "direct_prompt", true},
    {"paths", "metric_scores", "metric_scores", true},
};

std::string env_name(std::string_view setting) { return "PSEUDOREF_" + text::ascii_upper(setting); }

std::string node_to_string(const toml::node& node, std::string_view where) {
  if (auto s = node.value_exact<std::string>()) return *s;
  if (auto i = node.value_exact<std::int64_t>()) return std::to_string(*i);
  if (auto d = node.value_exact<double>()) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *d);
    return std::string(buf, end);
  }
  if (auto b = node.value_exact<bool>()) return *b ? "true" : "false";
  throw ConfigError("config key '" + std::string(where) + "' must be a string, number or boolean");
}

template <typename T>
T parse_number(const Settings& s, std::string_view key, T fallback) {
  auto it = s.find(key);
  if (it == s.end()) return fallback;
  T value{};
  const auto& str = it->second;
  auto [ptr, ec] = std::from_chars(str.data(), str.data() + str.size(), value);
  if (ec != std::errc() || ptr != str.data() + str.size()) {
    throw ConfigError("setting '" + std::string(key) + "' is not a valid number: '" + str + "'");
  }
  return value;
}

std::optional<std::string> get(const Settings& s, std::string_view key) {
  auto it = s.find(key);
  if (it == s.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

std::chrono::milliseconds seconds_setting(const Settings& s, std::string_view key, double fallback) {
  const double secs = parse_number<double>(s, key, fallback);
  if (!(secs > 0.0)) throw ConfigError("setting '" + std::string(key) + "' must be positive");
  return std::chrono::milliseconds(static_cast<long long>(secs * 1000.0));
}

}  // namespace

EnvLookup process_env() {
  return [](std::string_view name) -> std::optional<std::string> {
    const char* v = std::getenv(std::string(name).c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

const std::vector<std::string_view>& setting_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> out;
    for (const auto& k : kTomlKeys) out.push_back(k.setting);
    out.push_back("prompt_file");
    out.push_back("api_key");
    return out;
  }();
  return names;
}

Settings load_toml(const std::filesystem::path& path) {
  toml::table root;
  try {
    root = toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + std::string(e.description()));
  }
  const auto base = path.parent_path();
  Settings out;
  for (const auto& [table_name, table_node] : root) {
    const auto* table = table_node.as_table();
    if (!table) throw ConfigError("config key '" + std::string(table_name.str()) + "' must be a table");
    for (const auto& [key, node] : *table) {
      const auto where = std::string(table_name.str()) + "." + std::string(key.str());
      const auto* spec = std::find_if(std::begin(kTomlKeys), std::end(kTomlKeys), [&](const TomlKey& k) {
        return k.table == table_name.str() && k.key == key.str();
      });
      if (spec == std::end(kTomlKeys)) throw ConfigError("unknown config key '" + where + "'");
      auto value = node_to_string(node, where);
      if (spec->is_path && !value.empty()) {
        std::filesystem::path p(value);
        if (p.is_relative()) value = (base / p).lexically_normal().string();
      }
      out[std::string(spec->setting)] = value;
    }
  }
  return out;
}

corpus::DataFormat RunConfig::dataset_format() const {
  if (format) return *format;
  return dataset ? corpus::format_from_extension(*dataset) : corpus::DataFormat::jsonl;
}

Settings merge(const Settings& flags, const EnvLookup& env) {
  Settings merged;
  std::optional<std::string> config_path;
  if (auto it = flags.find("config"); it != flags.end()) config_path = it->second;
  if (!config_path) config_path = env("PSEUDOREF_CONFIG");
  if (config_path) {
    if (!std::filesystem::exists(*config_path)) throw ConfigError("config file not found: " + *config_path);
    merged = load_toml(*config_path);
  }
  for (auto name : setting_names()) {
    if (auto v = env(env_name(name))) merged[std::string(name)] = *v;
  }
  for (const auto& [k, v] : flags) {
    if (k != "config") merged[k] = v;
  }
  return merged;
}

RunConfig resolve(const Settings& flags, const EnvLookup& env) {
  for (const auto& [k, v] : flags) {
    if (k != "config" && std::find(setting_names().begin(), setting_names().end(), k) == setting_names().end()) {
      throw ConfigError("unknown setting '" + k + "'");
    }
  }
  const auto s = merge(flags, env);
  RunConfig cfg;

  if (auto v = get(s, "dataset")) cfg.dataset = *v;
  if (auto v = get(s, "format")) {
    cfg.format = corpus::parse_format(*v);
    if (!cfg.format) throw ConfigError("format must be 'jsonl' or 'tsv', got '" + *v + "'");
  }
  if (auto v = get(s, "method")) {
    auto m = scoring::parse_method(*v);
    if (!m) throw ConfigError("method must be 'generation' or 'direct', got '" + *v + "'");
    cfg.method = *m;
  }
  if (auto v = get(s, "language_names")) {
    if (*v == "display") {
      cfg.naming = scoring::LanguageNaming::display_names;
    } else if (*v == "codes") {
      cfg.naming = scoring::LanguageNaming::codes;
    } else {
      throw ConfigError("language_names must be 'display' or 'codes'");
    }
  }
  const auto parallelism = parse_number<long>(s, "parallelism", 1);
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  cfg.parallelism = static_cast<std::size_t>(parallelism);

  auto& b = cfg.backend;
  b.backend_id = get(s, "backend").value_or(std::string(llm::kMockBackend));
  b.model_id = get(s, "model").value_or(b.backend_id == llm::kMockBackend ? "mock" : "");
  if (auto v = get(s, "endpoint")) b.endpoint_url = *v;
  b.temperature = parse_number<double>(s, "temperature", 0.0);
  b.max_output_tokens = parse_number<int>(s, "max_output_tokens", 256);
  b.timeout = seconds_setting(s, "timeout_s", 60.0);
  b.max_retries = parse_number<int>(s, "max_retries", 3);
  try {
    b.validate();
  } catch (const llm::BackendError& e) {
    throw ConfigError(e.what());
  }
  if (auto v = get(s, "lexicon")) cfg.lexicon = *v;
  cfg.failure_rate = parse_number<double>(s, "failure_rate", 0.0);
  if (!(cfg.failure_rate >= 0.0 && cfg.failure_rate <= 1.0)) throw ConfigError("failure_rate must lie in [0, 1]");
  cfg.api_key = get(s, "api_key").value_or("");

  auto& e = cfg.embedder;
  if (auto v = get(s, "embedder")) {
    auto p = embed::parse_provider(*v);
    if (!p) throw ConfigError("embedder must be 'remote', 'mock' or 'file', got '" + *v + "'");
    e.provider = *p;
  }
  if (auto v = get(s, "replay_from")) {
    auto p = embed::parse_provider(*v);
    if (!p) throw ConfigError("replay_from must be 'remote' or 'mock'");
    e.replay_from = *p;
  }
  e.model_id = get(s, "embed_model").value_or("");
  if (auto v = get(s, "embed_endpoint")) e.endpoint_url = *v;
  const auto default_dim = e.provider == embed::ProviderId::mock ? embed::kDefaultMockDim : embed::kDefaultRemoteDim;
  const auto dim = parse_number<long>(s, "expected_dim", static_cast<long>(default_dim));
  const auto batch = parse_number<long>(s, "batch_size", 32);
  if (dim < 1) throw ConfigError("expected_dim must be >= 1");
  if (batch < 1) throw ConfigError("batch_size must be >= 1");
  e.expected_dim = static_cast<std::size_t>(dim);
  e.batch_size = static_cast<std::size_t>(batch);
  e.timeout = seconds_setting(s, "embed_timeout_s", 60.0);
  try {
    e.validate();
  } catch (const embed::EmbedError& err) {
    throw ConfigError(err.what());
  }

  if (auto v = get(s, "cache_dir")) cfg.cache_dir = *v;
  if (auto v = get(s, "out")) cfg.out_dir = *v;
  if (auto v = get(s, "generation_prompt")) cfg.generation_prompt = *v;
  if (auto v = get(s, "direct_prompt")) cfg.direct_prompt = *v;
  if (auto v = get(s, "prompt_file")) {
    (cfg.method == scoring::Method::generation_based ? cfg.generation_prompt : cfg.direct_prompt) = *v;
  }
  if (auto v = get(s, "metric_scores")) cfg.metric_scores = *v;
  return cfg;
}

void check_paths(const RunConfig& cfg, bool need_dataset) {
  const auto require = [](const std::optional<std::filesystem::path>& p, std::string_view what) {
    if (p && !std::filesystem::exists(*p)) {
      throw ConfigError(std::string(what) + " not found: " + p->string());
    }
  };
  if (need_dataset && !cfg.dataset) throw ConfigError("no dataset given (--dataset or [dataset] path)");
  if (need_dataset) require(cfg.dataset, "dataset");
  require(cfg.lexicon, "lexicon");
  require(cfg.generation_prompt, "generation prompt file");
  require(cfg.direct_prompt, "direct-scoring prompt file");
}

}  // namespace pseudoref::config
