// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/embed.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include <nlohmann/json.hpp>

#include "pseudoref/fileio.hpp"
#include "pseudoref/hashing.hpp"
#include "pseudoref/http.hpp"
#include "pseudoref/text.hpp"

namespace pseudoref::embed {
namespace {

using Kind = EmbedError::Kind;

constexpr std::string_view kMagic = "PREFVEC1";
constexpr std::size_t kHeaderSize = 16;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(std::string_view in, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(in[pos + i])) << (8 * i);
  return v;
}

}  // namespace

std::string_view to_string(ProviderId id) {
  switch (id) {
    case ProviderId::remote: return "remote";
    case ProviderId::mock: return "mock";
    case ProviderId::file: return "file";
  }
  return "?";
}

std::optional<ProviderId> parse_provider(std::string_view text) {
  if (text == "remote") return ProviderId::remote;
  if (text == "mock") return ProviderId::mock;
  if (text == "file") return ProviderId::file;
  return std::nullopt;
}

void EmbeddingProviderSpec::validate() const {
  if (expected_dim < 1) throw EmbedError(Kind::InvalidSpec, "expected_dim must be >= 1");
  if (batch_size < 1) throw EmbedError(Kind::InvalidSpec, "batch_size must be >= 1");
  if (provider == ProviderId::remote) {
    if (!endpoint_url || endpoint_url->empty()) throw EmbedError(Kind::InvalidSpec, "remote embedder needs an endpoint");
    try {
      http::Url::parse(*endpoint_url);
    } catch (const std::invalid_argument& e) {
      throw EmbedError(Kind::InvalidSpec, e.what());
    }
  }
  if (provider == ProviderId::file && replay_from == ProviderId::file) {
    throw EmbedError(Kind::InvalidSpec, "file provider cannot replay from itself");
  }
}

std::string EmbeddingProviderSpec::resolved_model_id() const {
  if (!model_id.empty()) return model_id;
  if (provider == ProviderId::mock) return "mock-fnv1a-" + std::to_string(expected_dim);
  return std::string(kDefaultRemoteModel);
}

EmbedError::EmbedError(Kind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

std::string_view to_string(EmbedError::Kind kind) {
  switch (kind) {
    case Kind::DimMismatch: return "DimMismatch";
    case Kind::EmptyText: return "EmptyText";
    case Kind::ProviderUnreachable: return "ProviderUnreachable";
    case Kind::ZeroVector: return "ZeroVector";
    case Kind::ZeroNorm: return "ZeroNorm";
    case Kind::ModelMismatch: return "ModelMismatch";
    case Kind::MalformedResponse: return "MalformedResponse";
    case Kind::InvalidSpec: return "InvalidSpec";
  }
  return "?";
}

EmbeddingVector mock_embed(std::string_view input, std::size_t dim) {
  if (dim == 0) throw EmbedError(Kind::InvalidSpec, "dim must be positive");
  if (text::is_blank(input)) throw EmbedError(Kind::EmptyText, "cannot embed blank text");
  const auto lowered = text::ascii_lower(input);
  std::vector<double> acc(dim, 0.0);
  for (auto token : text::split_whitespace(lowered)) {
    const auto h = fnv1a64(token);
    acc[h % dim] += ((h >> 32) & 1U) ? -1.0 : 1.0;
  }
  double norm_sq = 0.0;
  for (double v : acc) norm_sq += v * v;
  if (norm_sq == 0.0) throw EmbedError(Kind::ZeroVector, "token contributions cancel for '" + std::string(input) + "'");
  const double norm = std::sqrt(norm_sq);
  for (double& v : acc) v /= norm;
  return EmbeddingVector{std::move(acc), "mock-fnv1a-" + std::to_string(dim)};
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw EmbedError(Kind::DimMismatch, "cosine of vectors with dims " + std::to_string(a.size()) + " and " +
                                            std::to_string(b.size()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw EmbedError(Kind::ZeroNorm, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

std::string embedding_cache_key(std::string_view provider, std::string_view model_id, std::string_view text) {
  std::string canonical;
  canonical.reserve(provider.size() + model_id.size() + text.size() + 2);
  canonical += provider;
  canonical.push_back('\0');
  canonical += model_id;
  canonical.push_back('\0');
  canonical += text;
  return sha256_hex(canonical);
}

std::filesystem::path embedding_cache_path(const std::filesystem::path& cache_dir, std::string_view provider,
                                           std::string_view model_id, const std::string& key) {
  return cache_dir / "embeddings" / fileio::sanitize_component(provider) / fileio::sanitize_component(model_id) /
         key.substr(0, 2) / (key + ".vec");
}

std::string encode_vector(std::span<const double> values) {
  std::string out;
  out.reserve(kHeaderSize + 8 * values.size());
  out += kMagic;
  put_u32(out, static_cast<std::uint32_t>(values.size()));
  put_u32(out, 0);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
  return out;
}

std::optional<std::vector<double>> decode_vector(std::string_view blob) {
  if (blob.size() < kHeaderSize || blob.substr(0, kMagic.size()) != kMagic) return std::nullopt;
  const auto dim = get_u32(blob, 8);
  if (blob.size() != kHeaderSize + 8ULL * dim) return std::nullopt;
  std::vector<double> values(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(blob[kHeaderSize + 8 * i + b])) << (8 * b);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

Embedder::Embedder(EmbeddingProviderSpec spec, std::optional<std::filesystem::path> cache_dir)
    : spec_(std::move(spec)), cache_dir_(std::move(cache_dir)) {
  spec_.validate();
  model_id_ = spec_.resolved_model_id();
  if (spec_.provider == ProviderId::file && !cache_dir_) {
    throw EmbedError(Kind::InvalidSpec, "file provider needs a cache directory to replay from");
  }
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) {
  if (texts.empty()) throw EmbedError(Kind::EmptyText, "empty batch");
  for (const auto& t : texts) {
    if (text::is_blank(t)) throw EmbedError(Kind::EmptyText, "cannot embed blank text");
  }

  const auto own_provider = to_string(spec_.provider);
  const auto read_provider = spec_.provider == ProviderId::file ? to_string(spec_.replay_from) : own_provider;
  std::vector<std::optional<std::vector<double>>> found(texts.size());
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    found[i] = cache_load(read_provider, texts[i]);
    if (found[i]) {
      ++cache_hits_;
    } else {
      missing.push_back(i);
    }
  }

  if (!missing.empty()) {
    switch (spec_.provider) {
      case ProviderId::mock:
        for (auto i : missing) {
          ++provider_calls_;
          found[i] = mock_embed(texts[i], spec_.expected_dim).values;
          cache_store(texts[i], *found[i]);
        }
        break;
      case ProviderId::file:
        throw EmbedError(Kind::ProviderUnreachable,
                         "no cached vector for '" + texts[missing.front()] + "' under provider '" +
                             std::string(read_provider) + "', model '" + model_id_ + "'");
      case ProviderId::remote:
        for (std::size_t start = 0; start < missing.size(); start += spec_.batch_size) {
          const auto end = std::min(missing.size(), start + spec_.batch_size);
          std::vector<std::string> chunk;
          for (auto k = start; k < end; ++k) chunk.push_back(texts[missing[k]]);
          auto vectors = fetch_remote(chunk);
          for (auto k = start; k < end; ++k) {
            found[missing[k]] = std::move(vectors[k - start]);
            cache_store(texts[missing[k]], *found[missing[k]]);
          }
        }
        break;
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (auto& v : found) {
    if (v->size() != spec_.expected_dim) {
      throw EmbedError(Kind::DimMismatch, "got dim " + std::to_string(v->size()) + ", expected " +
                                              std::to_string(spec_.expected_dim));
    }
    out.push_back(EmbeddingVector{std::move(*v), model_id_});
  }
  return out;
}

std::vector<std::vector<double>> Embedder::fetch_remote(std::span<const std::string> texts) {
  ++provider_calls_;
  const nlohmann::json body = {{"texts", texts}};
  const auto response = http::post_json(*spec_.endpoint_url, "/embed", body.dump(), {}, spec_.timeout);
  if (response.failure != http::Failure::none) {
    throw EmbedError(Kind::ProviderUnreachable, *spec_.endpoint_url + ": " + response.error);
  }
  if (!response.ok()) {
    throw EmbedError(Kind::ProviderUnreachable, *spec_.endpoint_url + " returned HTTP " + std::to_string(response.status));
  }
  try {
    return decode_response(nlohmann::json::parse(response.body), texts.size());
  } catch (const nlohmann::json::exception& e) {
    throw EmbedError(Kind::MalformedResponse, e.what());
  }
}

std::vector<std::vector<double>> Embedder::decode_response(const nlohmann::json& doc, std::size_t n_texts) const {
  if (!doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array() || !doc.contains("dim")) {
    throw EmbedError(Kind::MalformedResponse, "response lacks 'dim' or 'vectors'");
  }
  if (doc.contains("model") && doc["model"].is_string() && !spec_.model_id.empty() &&
      doc["model"].get<std::string>() != spec_.model_id) {
    throw EmbedError(Kind::ModelMismatch,
                     "provider serves '" + doc["model"].get<std::string>() + "', configured '" + spec_.model_id + "'");
  }
  const auto dim = doc["dim"].get<std::size_t>();
  if (dim != spec_.expected_dim) {
    throw EmbedError(Kind::DimMismatch,
                     "provider dim " + std::to_string(dim) + ", expected " + std::to_string(spec_.expected_dim));
  }
  const auto& vectors = doc["vectors"];
  if (vectors.size() != n_texts) {
    throw EmbedError(Kind::MalformedResponse, "got " + std::to_string(vectors.size()) + " vectors for " +
                                                  std::to_string(n_texts) + " texts");
  }
  std::vector<std::vector<double>> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    auto values = v.get<std::vector<double>>();
    if (values.size() != dim) {
      throw EmbedError(Kind::DimMismatch, "vector of length " + std::to_string(values.size()) + " in a dim-" +
                                              std::to_string(dim) + " response");
    }
    if (!std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
      throw EmbedError(Kind::MalformedResponse, "non-finite vector entry");
    }
    out.push_back(std::move(values));
  }
  return out;
}

std::size_t Embedder::check_remote_health() const {
  if (spec_.provider != ProviderId::remote) throw EmbedError(Kind::InvalidSpec, "health check needs the remote provider");
  const auto response = http::get(*spec_.endpoint_url, "/healthz", spec_.timeout);
  if (!response.ok()) {
    throw EmbedError(Kind::ProviderUnreachable,
                     *spec_.endpoint_url + "/healthz: " +
                         (response.failure != http::Failure::none ? response.error
                                                                  : "HTTP " + std::to_string(response.status)));
  }
  try {
    const auto doc = nlohmann::json::parse(response.body);
    if (doc.value("status", "") != "ok") throw EmbedError(Kind::ProviderUnreachable, "service not ready");
    return doc.at("dim").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw EmbedError(Kind::MalformedResponse, e.what());
  }
}

std::optional<std::vector<double>> Embedder::cache_load(std::string_view provider, const std::string& text) const {
  if (!cache_dir_) return std::nullopt;
  const auto key = embedding_cache_key(provider, model_id_, text);
  auto blob = fileio::try_read_file(embedding_cache_path(*cache_dir_, provider, model_id_, key));
  if (!blob) return std::nullopt;
  return decode_vector(*blob);
}

void Embedder::cache_store(const std::string& text, const std::vector<double>& values) const {
  if (!cache_dir_ || spec_.provider == ProviderId::file) return;
  const auto provider = to_string(spec_.provider);
  const auto key = embedding_cache_key(provider, model_id_, text);
  fileio::write_file_atomic(embedding_cache_path(*cache_dir_, provider, model_id_, key), encode_vector(values));
}

}  // namespace pseudoref::embed
