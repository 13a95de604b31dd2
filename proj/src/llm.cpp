// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/llm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "pseudoref/fileio.hpp"
#include "pseudoref/hashing.hpp"
#include "pseudoref/http.hpp"
#include "pseudoref/text.hpp"

namespace pseudoref::llm {
namespace {

using Kind = BackendError::Kind;

constexpr std::string_view kSentenceMarker = "Sentence: ";
constexpr std::string_view kTranslationSuffix = "\nTranslation:";
constexpr std::string_view kScoreSuffix = "Score (0-100):";

std::string shortest_decimal(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::optional<FinishReason> parse_finish_reason(std::string_view s) {
  if (s == "stop") return FinishReason::stop;
  if (s == "length") return FinishReason::length;
  if (s == "error") return FinishReason::error;
  return std::nullopt;
}

// Transient failure of one remote attempt.
struct AttemptFailure {
  Kind kind;
  std::string detail;
  int status = 0;
};

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry_index) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const double cap = static_cast<double>(policy.base_delay.count()) * std::pow(policy.factor, retry_index);
  std::uniform_real_distribution<double> jitter(0.0, cap);
  return std::chrono::milliseconds(static_cast<long long>(jitter(rng)));
}

}  // namespace

void BackendSpec::validate() const {
  if (backend_id != kMockBackend && backend_id != kOpenAiBackend) {
    throw BackendError(Kind::InvalidSpec, "unknown backend '" + backend_id + "'");
  }
  if (model_id.empty()) throw BackendError(Kind::InvalidSpec, "model id is empty");
  if (!(temperature >= 0.0)) throw BackendError(Kind::InvalidSpec, "temperature must be >= 0");
  if (max_output_tokens < 1) throw BackendError(Kind::InvalidSpec, "max_output_tokens must be >= 1");
  if (max_retries < 0) throw BackendError(Kind::InvalidSpec, "max_retries must be >= 0");
  if (timeout.count() <= 0) throw BackendError(Kind::InvalidSpec, "timeout must be positive");
  if (backend_id == kOpenAiBackend) {
    if (!endpoint_url || endpoint_url->empty()) {
      throw BackendError(Kind::InvalidSpec, "backend '" + backend_id + "' needs an endpoint URL");
    }
    try {
      http::Url::parse(*endpoint_url);
    } catch (const std::invalid_argument& e) {
      throw BackendError(Kind::InvalidSpec, e.what());
    }
  }
}

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::stop: return "stop";
    case FinishReason::length: return "length";
    case FinishReason::error: return "error";
  }
  return "error";
}

BackendError::BackendError(Kind kind, const std::string& detail, int http_status)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), http_status_(http_status) {}

std::string_view to_string(BackendError::Kind kind) {
  switch (kind) {
    case Kind::Timeout: return "Timeout";
    case Kind::HttpStatus: return "HttpStatus";
    case Kind::RetriesExhausted: return "RetriesExhausted";
    case Kind::BackendRefusal: return "BackendRefusal";
    case Kind::Unreachable: return "Unreachable";
    case Kind::MalformedResponse: return "MalformedResponse";
    case Kind::InvalidSpec: return "InvalidSpec";
  }
  return "?";
}

std::string cache_key(const BackendSpec& spec, const prompt::RenderedPrompt& prompt) {
  std::string canonical;
  canonical.reserve(prompt.text.size() + 64);
  canonical += spec.backend_id;
  canonical.push_back('\0');
  canonical += spec.model_id;
  canonical.push_back('\0');
  canonical += shortest_decimal(spec.temperature);
  canonical.push_back('\0');
  canonical += std::to_string(spec.max_output_tokens);
  canonical.push_back('\0');
  canonical += prompt.text;
  return sha256_hex(canonical);
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  const auto doc = nlohmann::json::parse(fileio::read_file(path));
  if (!doc.is_object()) throw std::runtime_error("lexicon must be a JSON object: " + path.string());
  Lexicon lexicon;
  for (const auto& [src, translation] : doc.items()) lexicon.emplace(src, translation.get<std::string>());
  return lexicon;
}

CompletionResult mock_complete(const prompt::RenderedPrompt& prompt, const Lexicon& lexicon) {
  std::string_view text = prompt.text;
  if (text.ends_with(kScoreSuffix)) {
    return CompletionResult{std::to_string(fnv1a64(text) % 101), FinishReason::stop, {}, false};
  }
  std::string_view source = text;
  if (auto marker = text.rfind(kSentenceMarker); marker != std::string_view::npos) {
    source = text.substr(marker + kSentenceMarker.size());
  }
  if (source.ends_with(kTranslationSuffix)) source.remove_suffix(kTranslationSuffix.size());

  if (auto it = lexicon.find(source); it != lexicon.end()) {
    return CompletionResult{it->second, FinishReason::stop, {}, false};
  }
  auto words = text::split_whitespace(source);
  std::reverse(words.begin(), words.end());
  std::string out = "MOCK:";
  for (auto w : words) {
    out.push_back(' ');
    out += w;
  }
  return CompletionResult{std::move(out), FinishReason::stop, {}, false};
}

bool mock_should_fail(std::string_view segment_id, double rate) {
  if (rate <= 0.0 || segment_id.empty()) return false;
  return static_cast<double>(fnv1a64(segment_id) % 1'000'000ULL) < rate * 1e6;
}

std::filesystem::path completion_cache_path(const std::filesystem::path& cache_dir, const std::string& key) {
  return cache_dir / "completions" / key.substr(0, 2) / (key + ".json");
}

Gateway::Gateway(BackendSpec spec, GatewayOptions options)
    : spec_(std::move(spec)),
      options_(std::move(options)),
      in_flight_(std::make_unique<std::counting_semaphore<>>(
          static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, options_.max_in_flight)))) {
  spec_.validate();
  if (options_.failure_rate < 0.0 || options_.failure_rate > 1.0) {
    throw BackendError(Kind::InvalidSpec, "failure rate must lie in [0, 1]");
  }
}

Gateway::~Gateway() = default;

CompletionResult Gateway::complete(const prompt::RenderedPrompt& prompt, const CallOptions& call) {
  if (prompt.text.empty()) throw BackendError(Kind::InvalidSpec, "prompt is empty");
  const auto key = cache_key(spec_, prompt);
  if (!call.refresh) {
    if (auto hit = cache_load(key)) {
      ++cache_hits_;
      return *hit;
    }
  }
  auto result = call_backend(prompt, call);
  cache_store(key, result);
  return result;
}

CompletionResult Gateway::call_backend(const prompt::RenderedPrompt& prompt, const CallOptions& call) {
  if (spec_.backend_id == kMockBackend) {
    ++backend_calls_;
    if (mock_should_fail(call.failure_key, options_.failure_rate)) {
      throw BackendError(Kind::BackendRefusal, "injected mock failure for '" + std::string(call.failure_key) + "'");
    }
    return mock_complete(prompt, options_.lexicon);
  }
  return call_remote(prompt);
}

CompletionResult Gateway::call_remote(const prompt::RenderedPrompt& prompt) {
  nlohmann::json body = {
      {"model", spec_.model_id},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.text}}})},
      {"temperature", spec_.temperature},
      {"max_tokens", spec_.max_output_tokens},
  };
  const auto payload = body.dump();
  http::Headers headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  std::optional<AttemptFailure> last;
  bool all_unreachable = true;
  const int attempts = spec_.max_retries + 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(backoff_delay(options_.retry, attempt - 1));

    const auto started = std::chrono::steady_clock::now();
    http::Response response;
    {
      in_flight_->acquire();
      ++backend_calls_;
      try {
        response = http::post_json(*spec_.endpoint_url, "/v1/chat/completions", payload, headers, spec_.timeout);
      } catch (...) {
        in_flight_->release();
        throw;
      }
      in_flight_->release();
    }
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

    if (response.failure != http::Failure::none) {
      if (response.failure == http::Failure::connection) {
        last = AttemptFailure{Kind::Unreachable, response.error};
      } else {
        all_unreachable = false;
        last = AttemptFailure{response.failure == http::Failure::timeout ? Kind::Timeout : Kind::Unreachable,
                              response.error};
      }
      continue;
    }
    all_unreachable = false;
    const int status = response.status;
    if (status < 200 || status >= 300) {
      const bool transient = status == 408 || status == 429 || status >= 500;
      AttemptFailure failure{Kind::HttpStatus, "HTTP " + std::to_string(status), status};
      if (!transient) throw BackendError(failure.kind, failure.detail, status);
      last = std::move(failure);
      continue;
    }

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(response.body);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(Kind::MalformedResponse, e.what());
    }
    const auto& choices = doc.value("choices", nlohmann::json::array());
    if (!choices.is_array() || choices.empty() || !choices[0].contains("message")) {
      throw BackendError(Kind::MalformedResponse, "response has no choices[0].message");
    }
    const auto& choice = choices[0];
    const auto& content = choice["message"].value("content", nlohmann::json());
    std::string text = content.is_string() ? content.get<std::string>() : std::string();
    auto finish = FinishReason::stop;
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
      finish = parse_finish_reason(choice["finish_reason"].get<std::string>()).value_or(FinishReason::stop);
    }
    if (text.empty()) {
      last = AttemptFailure{Kind::BackendRefusal, "empty completion"};
      continue;
    }
    return CompletionResult{std::move(text), finish, latency, false};
  }

  if (last->kind == Kind::BackendRefusal) {
    throw BackendError(Kind::BackendRefusal, "empty completion after " + std::to_string(attempts) + " attempt(s)");
  }
  if (all_unreachable) throw BackendError(Kind::Unreachable, last->detail);
  if (spec_.max_retries == 0) throw BackendError(last->kind, last->detail, last->status);
  throw BackendError(Kind::RetriesExhausted,
                     std::to_string(attempts) + " attempts failed; last: " + last->detail, last->status);
}

std::optional<CompletionResult> Gateway::cache_load(const std::string& key) const {
  if (!options_.cache_dir) return std::nullopt;
  auto content = fileio::try_read_file(completion_cache_path(*options_.cache_dir, key));
  if (!content) return std::nullopt;
  try {
    const auto doc = nlohmann::json::parse(*content);
    if (doc.value("key", "") != key) return std::nullopt;
    auto finish = parse_finish_reason(doc.value("finish_reason", "stop")).value_or(FinishReason::stop);
    return CompletionResult{doc.at("text").get<std::string>(), finish, std::chrono::milliseconds{0}, true};
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;  // unreadable entries are recomputed and overwritten
  }
}

void Gateway::cache_store(const std::string& key, const CompletionResult& result) const {
  if (!options_.cache_dir || result.finish_reason == FinishReason::error) return;
  nlohmann::ordered_json doc;
  doc["key"] = key;
  doc["backend_id"] = spec_.backend_id;
  doc["model_id"] = spec_.model_id;
  doc["text"] = result.text;
  doc["finish_reason"] = to_string(result.finish_reason);
  fileio::write_file_atomic(completion_cache_path(*options_.cache_dir, key), doc.dump(2) + "\n");
}

}  // namespace pseudoref::llm
