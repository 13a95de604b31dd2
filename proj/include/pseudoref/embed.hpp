// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pseudoref::embed {

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;

  std::size_t dim() const { return values.size(); }
  bool operator==(const EmbeddingVector&) const = default;
};

enum class ProviderId { remote, mock, file };

std::string_view to_string(ProviderId id);
std::optional<ProviderId> parse_provider(std::string_view text);

inline constexpr std::string_view kDefaultRemoteModel = "all-mpnet-base-v2";
inline constexpr std::size_t kDefaultRemoteDim = 768;
inline constexpr std::size_t kDefaultMockDim = 16;

struct EmbeddingProviderSpec {
  ProviderId provider = ProviderId::mock;
  std::optional<std::string> endpoint_url;
  /// Empty selects the provider default ("mock-fnv1a-<dim>" for the mock).
  std::string model_id;
  std::size_t expected_dim = kDefaultMockDim;
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{60'000};
  /// Which provider's cache entries the file provider replays.
  ProviderId replay_from = ProviderId::remote;

  void validate() const;
  std::string resolved_model_id() const;
};

class EmbedError : public std::runtime_error {
 public:
  enum class Kind {
    DimMismatch,
    EmptyText,
    ProviderUnreachable,
    ZeroVector,
    ZeroNorm,
    ModelMismatch,
    MalformedResponse,
    InvalidSpec,
  };

  EmbedError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(EmbedError::Kind kind);

/// Hashed bag-of-words embedding: each lowercased token adds +1 or -1 at
/// index FNV-1a-64(token) mod dim (sign from bit 32 of the hash), and the
/// result is L2-normalized. Throws ZeroVector if every contribution cancels.
EmbeddingVector mock_embed(std::string_view text, std::size_t dim = kDefaultMockDim);

/// dot(a, b) / (|a| |b|), clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// SHA-256 of provider + NUL + model + NUL + text.
std::string embedding_cache_key(std::string_view provider, std::string_view model_id, std::string_view text);

/// cache_dir/embeddings/<provider>/<model>/<first 2 hex>/<key>.vec
std::filesystem::path embedding_cache_path(const std::filesystem::path& cache_dir, std::string_view provider,
                                           std::string_view model_id, const std::string& key);

/// "PREFVEC1", u32 dim, u32 reserved, then dim little-endian f64 values.
std::string encode_vector(std::span<const double> values);
/// Returns nullopt for a truncated or foreign blob.
std::optional<std::vector<double>> decode_vector(std::string_view blob);

/// A configured embedding provider plus its vector cache. Thread-safe.
class Embedder {
 public:
  Embedder(EmbeddingProviderSpec spec, std::optional<std::filesystem::path> cache_dir);

  /// One vector per text, in input order.
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);

  /// GET /healthz on the remote provider; returns the advertised dim.
  std::size_t check_remote_health() const;

  const EmbeddingProviderSpec& spec() const { return spec_; }
  const std::string& model_id() const { return model_id_; }
  std::size_t provider_calls() const { return provider_calls_.load(); }
  std::size_t cache_hits() const { return cache_hits_.load(); }

 private:
  std::optional<std::vector<double>> cache_load(std::string_view provider, const std::string& text) const;
  void cache_store(const std::string& text, const std::vector<double>& values) const;
  std::vector<std::vector<double>> fetch_remote(std::span<const std::string> texts);
  std::vector<std::vector<double>> decode_response(const nlohmann::json& doc, std::size_t n_texts) const;

  EmbeddingProviderSpec spec_;
  std::string model_id_;
  std::optional<std::filesystem::path> cache_dir_;
  std::atomic<std::size_t> provider_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace pseudoref::embed
