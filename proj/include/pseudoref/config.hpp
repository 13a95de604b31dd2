// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pseudoref/corpus.hpp"
#include "pseudoref/embed.hpp"
#include "pseudoref/llm.hpp"
#include "pseudoref/scorer.hpp"

namespace pseudoref::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Looks up an environment variable; nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(std::string_view)>;

EnvLookup process_env();

/// Setting name -> raw string value. Names double as the flag spelling
/// ("cache_dir" <-> --cache-dir) and the env suffix (PSEUDOREF_CACHE_DIR).
using Settings = std::map<std::string, std::string, std::less<>>;

/// Every recognised setting name.
const std::vector<std::string_view>& setting_names();

/// Reads a TOML config file into settings; relative paths are resolved
/// against the file's directory. Unknown tables or keys are errors.
Settings load_toml(const std::filesystem::path& path);

struct RunConfig {
  std::optional<std::filesystem::path> dataset;
  std::optional<corpus::DataFormat> format;
  scoring::Method method = scoring::Method::generation_based;
  scoring::LanguageNaming naming = scoring::LanguageNaming::display_names;
  std::size_t parallelism = 1;

  llm::BackendSpec backend;
  std::optional<std::filesystem::path> lexicon;
  double failure_rate = 0.0;
  std::string api_key;

  embed::EmbeddingProviderSpec embedder;

  std::filesystem::path cache_dir = ".pseudoref-cache";
  std::filesystem::path out_dir = "out";
  std::optional<std::filesystem::path> generation_prompt;
  std::optional<std::filesystem::path> direct_prompt;
  std::optional<std::filesystem::path> metric_scores;

  corpus::DataFormat dataset_format() const;
};

/// Merges settings with precedence flags > environment > config file >
/// defaults, then converts and validates them. `flags` may hold "config".
RunConfig resolve(const Settings& flags, const EnvLookup& env);

/// Like resolve() but only merges, without conversion.
Settings merge(const Settings& flags, const EnvLookup& env);

/// Throws ConfigError if a referenced input path does not exist.
void check_paths(const RunConfig& cfg, bool need_dataset);

}  // namespace pseudoref::config
