// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>

#include "pseudoref/prompt.hpp"

namespace pseudoref::llm {

inline constexpr std::string_view kMockBackend = "mock";
inline constexpr std::string_view kOpenAiBackend = "openai-compatible";

struct BackendSpec {
  std::string backend_id = std::string(kMockBackend);
  std::string model_id = "mock";
  std::optional<std::string> endpoint_url;
  double temperature = 0.0;
  int max_output_tokens = 256;
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 3;

  /// Throws BackendError(InvalidSpec).
  void validate() const;
};

enum class FinishReason { stop, length, error };

std::string_view to_string(FinishReason reason);

struct CompletionResult {
  std::string text;
  FinishReason finish_reason = FinishReason::stop;
  std::chrono::milliseconds latency{0};
  bool cached = false;
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind {
    Timeout,
    HttpStatus,
    RetriesExhausted,
    BackendRefusal,
    Unreachable,
    MalformedResponse,
    InvalidSpec,
  };

  BackendError(Kind kind, const std::string& detail, int http_status = 0);
  Kind kind() const { return kind_; }
  int http_status() const { return http_status_; }

 private:
  Kind kind_;
  int http_status_;
};

std::string_view to_string(BackendError::Kind kind);

/// SHA-256 over backend_id, model_id, temperature, max_output_tokens and the
/// prompt text, joined by NUL bytes. Temperature uses the shortest decimal
/// that round-trips (0 -> "0", 0.7 -> "0.7").
std::string cache_key(const BackendSpec& spec, const prompt::RenderedPrompt& prompt);

using Lexicon = std::map<std::string, std::string, std::less<>>;

Lexicon load_lexicon(const std::filesystem::path& path);

/// Offline stand-in for a generation model. Generation prompts are answered
/// from the lexicon, or with "MOCK: " plus the source words in reverse order;
/// direct-scoring prompts get FNV-1a-64(prompt) mod 101.
CompletionResult mock_complete(const prompt::RenderedPrompt& prompt, const Lexicon& lexicon);

/// Failure injection: true iff FNV-1a-64(id) mod 10^6 < rate * 10^6.
bool mock_should_fail(std::string_view segment_id, double rate);

struct RetryPolicy {
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
};

struct GatewayOptions {
  std::optional<std::filesystem::path> cache_dir;
  std::size_t max_in_flight = 1;
  RetryPolicy retry;
  Lexicon lexicon;
  double failure_rate = 0.0;
  std::string api_key;
};

struct CallOptions {
  /// Segment id used for mock failure injection.
  std::string_view failure_key;
  /// Skip the cache lookup (the fresh result still overwrites the entry).
  bool refresh = false;
};

/// A configured backend plus its cache. Thread-safe.
class Gateway {
 public:
  Gateway(BackendSpec spec, GatewayOptions options);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  CompletionResult complete(const prompt::RenderedPrompt& prompt, const CallOptions& call = {});

  const BackendSpec& spec() const { return spec_; }
  std::size_t backend_calls() const { return backend_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  CompletionResult call_backend(const prompt::RenderedPrompt& prompt, const CallOptions& call);
  CompletionResult call_remote(const prompt::RenderedPrompt& prompt);
  std::optional<CompletionResult> cache_load(const std::string& key) const;
  void cache_store(const std::string& key, const CompletionResult& result) const;

  BackendSpec spec_;
  GatewayOptions options_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

/// cache_dir/completions/<first 2 hex>/<key>.json
std::filesystem::path completion_cache_path(const std::filesystem::path& cache_dir, const std::string& key);

}  // namespace pseudoref::llm
