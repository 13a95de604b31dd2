// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pseudoref/corpus.hpp"
#include "pseudoref/embed.hpp"
#include "pseudoref/llm.hpp"
#include "pseudoref/prompt.hpp"
#include "pseudoref/scores.hpp"

namespace pseudoref::scoring {

enum class GenerationStatus { ok, empty_after_cleanup, backend_failed };

std::string_view to_string(GenerationStatus status);

/// Invariant: status == ok iff reference holds a non-empty string.
struct GenerationRecord {
  std::string segment_id;
  std::string raw_output;
  std::optional<std::string> reference;
  GenerationStatus status = GenerationStatus::backend_failed;
  int attempts = 0;
  std::string backend_id;
  std::string model_id;
  std::string prompt_hash;
};

/// Generation attempts per segment: one plus two retries.
inline constexpr int kGenerationAttempts = 3;

/// Reduces a model reply to one clean sentence: trims, drops a leading
/// "Translation:" label, keeps the first non-empty line and strips one pair of
/// surrounding straight or curly double quotes. nullopt means EmptyAfterCleanup.
std::optional<std::string> postprocess_reference(std::string_view raw);

enum class ScoreParseError { NoNumberFound, OutOfRange };

std::string_view to_string(ScoreParseError error);

/// First unsigned decimal number (optional fractional part) in the reply,
/// accepted iff it lies in [0, 100]. Text up to an echoed "Score (0-100):"
/// label is skipped so the label's own digits are not mistaken for a score.
std::variant<double, ScoreParseError> parse_direct_score(std::string_view raw);

enum class LanguageNaming { display_names, codes };

struct ScoringContext {
  llm::Gateway& gateway;
  /// Required for the generation-based method.
  embed::Embedder* embedder = nullptr;
  const prompt::PromptTemplate* generation_template = &prompt::PromptTemplate::builtin(prompt::TemplateId::generation);
  const prompt::PromptTemplate* direct_template =
      &prompt::PromptTemplate::builtin(prompt::TemplateId::direct_scoring);
  LanguageNaming naming = LanguageNaming::display_names;
};

/// Never throws for backend or provider failures; they become invalid scores.
std::pair<GenerationRecord, QualityScore> score_segment_generation(const corpus::Segment& seg, ScoringContext& ctx);

/// One attempt; a reply without a usable number yields an invalid score.
QualityScore score_segment_direct(const corpus::Segment& seg, ScoringContext& ctx);

struct PairCounts {
  std::size_t total = 0;
  std::size_t scored = 0;
  std::size_t failed = 0;
};

struct RunManifest {
  std::string dataset;
  Method method = Method::generation_based;
  llm::BackendSpec backend;
  std::optional<embed::EmbeddingProviderSpec> embedder;
  std::string embedder_model;
  std::vector<std::string> templates;
  std::vector<std::pair<corpus::LanguagePair, PairCounts>> pairs;
  std::size_t parallelism = 1;
  std::size_t backend_calls = 0;
  std::size_t completion_cache_hits = 0;
  std::size_t embedding_calls = 0;
  std::size_t embedding_cache_hits = 0;
  std::chrono::milliseconds wall_time{0};

  PairCounts totals() const;
  nlohmann::ordered_json to_json() const;
};

struct EvaluationResult {
  std::vector<QualityScore> scores;              // dataset order
  std::vector<GenerationRecord> generations;     // generation method only, dataset order
  RunManifest manifest;
};

/// Raised when the run cannot make progress, e.g. the endpoint is unreachable
/// before any segment succeeded.
class PipelineAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scores every segment with up to `parallelism` concurrent workers. Output
/// order is the dataset order regardless of completion order.
EvaluationResult run_evaluation(const corpus::EvaluationSet& set, Method method, ScoringContext& ctx,
                                std::size_t parallelism);

std::string generations_to_jsonl(const std::vector<GenerationRecord>& records);

}  // namespace pseudoref::scoring
