// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/scorer.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "pseudoref/hashing.hpp"
#include "pseudoref/languages.hpp"
#include "pseudoref/text.hpp"

namespace pseudoref::scoring {
namespace {

enum class FailureCause { none, unreachable, other };

struct SegmentOutcome {
  std::optional<GenerationRecord> generation;
  QualityScore score;
  FailureCause cause = FailureCause::none;
};

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  return text::ascii_lower(s.substr(0, prefix.size())) == text::ascii_lower(prefix);
}

std::string_view strip_quotes(std::string_view s) {
  constexpr std::string_view kOpenCurly = "\xE2\x80\x9C";
  constexpr std::string_view kCloseCurly = "\xE2\x80\x9D";
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  if (s.size() >= kOpenCurly.size() + kCloseCurly.size() && s.starts_with(kOpenCurly) && s.ends_with(kCloseCurly)) {
    return s.substr(kOpenCurly.size(), s.size() - kOpenCurly.size() - kCloseCurly.size());
  }
  return s;
}

std::string language_name(const std::string& code, LanguageNaming naming) {
  return naming == LanguageNaming::display_names ? language_display_name(code) : text::ascii_upper(code);
}

QualityScore invalid(const corpus::Segment& seg, Method method, std::string detail) {
  return QualityScore{seg.id, method, std::nullopt, false, std::move(detail)};
}

SegmentOutcome generation_outcome(const corpus::Segment& seg, ScoringContext& ctx) {
  SegmentOutcome out;
  GenerationRecord rec;
  rec.segment_id = seg.id;
  rec.backend_id = ctx.gateway.spec().backend_id;
  rec.model_id = ctx.gateway.spec().model_id;

  const auto prompt = prompt::build_generation_prompt(seg.src, *ctx.generation_template);
  rec.prompt_hash = sha256_hex(prompt.text);

  std::string failure;
  for (int attempt = 1; attempt <= kGenerationAttempts; ++attempt) {
    rec.attempts = attempt;
    try {
      // Retries bypass the cache; a cached reply would only repeat itself.
      const auto result = ctx.gateway.complete(prompt, llm::CallOptions{seg.id, attempt > 1});
      rec.raw_output = result.text;
      if (auto reference = postprocess_reference(result.text)) {
        rec.reference = std::move(reference);
        rec.status = GenerationStatus::ok;
        break;
      }
      rec.status = GenerationStatus::empty_after_cleanup;
      failure = "EmptyAfterCleanup";
    } catch (const llm::BackendError& e) {
      if (e.kind() == llm::BackendError::Kind::InvalidSpec) throw;
      rec.status = GenerationStatus::backend_failed;
      failure = e.what();
      if (e.kind() == llm::BackendError::Kind::Unreachable) {
        out.cause = FailureCause::unreachable;
        break;
      }
    }
  }

  if (rec.status != GenerationStatus::ok) {
    if (out.cause == FailureCause::none) out.cause = FailureCause::other;
    out.score = invalid(seg, Method::generation_based, std::string(to_string(rec.status)) + ": " + failure);
    out.generation = std::move(rec);
    return out;
  }

  try {
    const std::vector<std::string> texts = {*rec.reference, seg.mt};
    const auto vectors = ctx.embedder->embed_batch(texts);
    const double value = embed::cosine_similarity(vectors[0], vectors[1]);
    out.score = QualityScore{seg.id, Method::generation_based, value, true, "ok"};
  } catch (const embed::EmbedError& e) {
    if (e.kind() == embed::EmbedError::Kind::InvalidSpec) throw;
    out.cause = e.kind() == embed::EmbedError::Kind::ProviderUnreachable ? FailureCause::unreachable
                                                                          : FailureCause::other;
    out.score = invalid(seg, Method::generation_based, std::string("embedding_failed: ") + e.what());
  }
  out.generation = std::move(rec);
  return out;
}

SegmentOutcome direct_outcome(const corpus::Segment& seg, ScoringContext& ctx) {
  SegmentOutcome out;
  const auto src_lang = language_name(seg.lp.source(), ctx.naming);
  const auto tgt_lang = language_name(seg.lp.target(), ctx.naming);
  const auto& tpl = *ctx.direct_template;
  const auto prompt = tpl.uses("src") ? prompt::build_direct_scoring_prompt(src_lang, tgt_lang, seg.src, seg.mt, tpl)
                                      : prompt::build_direct_scoring_prompt(src_lang, tgt_lang, seg.mt, tpl);
  try {
    const auto result = ctx.gateway.complete(prompt, llm::CallOptions{seg.id, false});
    const auto parsed = parse_direct_score(result.text);
    if (const auto* value = std::get_if<double>(&parsed)) {
      out.score = QualityScore{seg.id, Method::direct_scoring, *value, true, "ok"};
    } else {
      out.cause = FailureCause::other;
      out.score = invalid(seg, Method::direct_scoring, std::string(to_string(std::get<ScoreParseError>(parsed))));
    }
  } catch (const llm::BackendError& e) {
    if (e.kind() == llm::BackendError::Kind::InvalidSpec) throw;
    out.cause = e.kind() == llm::BackendError::Kind::Unreachable ? FailureCause::unreachable : FailureCause::other;
    out.score = invalid(seg, Method::direct_scoring, std::string("backend_failed: ") + e.what());
  }
  return out;
}

std::string template_label(const prompt::PromptTemplate& tpl) {
  std::string label(prompt::to_string(tpl.id()));
  if (tpl.body() != prompt::PromptTemplate::builtin(tpl.id()).body()) {
    label += " (custom sha256:" + sha256_hex(tpl.body()).substr(0, 16) + ")";
  }
  return label;
}

}  // namespace

std::string_view to_string(GenerationStatus status) {
  switch (status) {
    case GenerationStatus::ok: return "ok";
    case GenerationStatus::empty_after_cleanup: return "empty_after_cleanup";
    case GenerationStatus::backend_failed: return "backend_failed";
  }
  return "?";
}

std::string_view to_string(ScoreParseError error) {
  return error == ScoreParseError::NoNumberFound ? "NoNumberFound" : "OutOfRange";
}

std::optional<std::string> postprocess_reference(std::string_view raw) {
  constexpr std::string_view kLabel = "Translation:";
  auto s = text::trim(raw);
  if (iequals_prefix(s, kLabel)) s = text::trim(s.substr(kLabel.size()));
  for (auto line : text::split_lines(s)) {
    line = text::trim(line);
    if (line.empty()) continue;
    const auto cleaned = text::trim(strip_quotes(line));
    if (cleaned.empty()) return std::nullopt;
    return std::string(cleaned);
  }
  return std::nullopt;
}

std::variant<double, ScoreParseError> parse_direct_score(std::string_view raw) {
  constexpr std::string_view kLabel = "score (0-100):";
  const auto lowered = text::ascii_lower(raw);
  std::size_t pos = 0;
  if (auto label = lowered.rfind(kLabel); label != std::string::npos) pos = label + kLabel.size();

  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (pos < raw.size() && !is_digit(raw[pos])) ++pos;
  if (pos == raw.size()) return ScoreParseError::NoNumberFound;
  auto end = pos;
  while (end < raw.size() && is_digit(raw[end])) ++end;
  if (end + 1 < raw.size() && raw[end] == '.' && is_digit(raw[end + 1])) {
    ++end;
    while (end < raw.size() && is_digit(raw[end])) ++end;
  }
  const std::string token(raw.substr(pos, end - pos));
  const double value = std::strtod(token.c_str(), nullptr);
  if (!(value >= 0.0 && value <= 100.0)) return ScoreParseError::OutOfRange;
  return value;
}

std::pair<GenerationRecord, QualityScore> score_segment_generation(const corpus::Segment& seg, ScoringContext& ctx) {
  if (!ctx.embedder) throw std::invalid_argument("generation-based scoring needs an embedder");
  auto outcome = generation_outcome(seg, ctx);
  return {std::move(*outcome.generation), std::move(outcome.score)};
}

QualityScore score_segment_direct(const corpus::Segment& seg, ScoringContext& ctx) {
  return direct_outcome(seg, ctx).score;
}

PairCounts RunManifest::totals() const {
  PairCounts t;
  for (const auto& [lp, c] : pairs) {
    t.total += c.total;
    t.scored += c.scored;
    t.failed += c.failed;
  }
  return t;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["dataset"] = dataset;
  j["method"] = to_string(method);
  j["backend"] = {
      {"backend_id", backend.backend_id},
      {"model_id", backend.model_id},
      {"endpoint_url", backend.endpoint_url ? nlohmann::ordered_json(*backend.endpoint_url) : nlohmann::ordered_json(nullptr)},
      {"temperature", backend.temperature},
      {"max_output_tokens", backend.max_output_tokens},
      {"timeout_ms", backend.timeout.count()},
      {"max_retries", backend.max_retries},
  };
  if (embedder) {
    j["embedder"] = {
        {"provider", embed::to_string(embedder->provider)},
        {"model_id", embedder_model},
        {"endpoint_url", embedder->endpoint_url ? nlohmann::ordered_json(*embedder->endpoint_url) : nlohmann::ordered_json(nullptr)},
        {"expected_dim", embedder->expected_dim},
        {"batch_size", embedder->batch_size},
    };
  } else {
    j["embedder"] = nullptr;
  }
  j["templates"] = templates;
  auto& jp = j["pairs"] = nlohmann::ordered_json::object();
  for (const auto& [lp, c] : pairs) {
    jp[lp.display()] = {{"total", c.total}, {"scored", c.scored}, {"failed", c.failed}};
  }
  const auto t = totals();
  j["totals"] = {{"total", t.total}, {"scored", t.scored}, {"failed", t.failed}};
  j["parallelism"] = parallelism;
  j["backend_calls"] = backend_calls;
  j["completion_cache_hits"] = completion_cache_hits;
  j["embedding_calls"] = embedding_calls;
  j["embedding_cache_hits"] = embedding_cache_hits;
  j["wall_time_s"] = static_cast<double>(wall_time.count()) / 1000.0;
  return j;
}

EvaluationResult run_evaluation(const corpus::EvaluationSet& set, Method method, ScoringContext& ctx,
                                std::size_t parallelism) {
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
  if (method == Method::generation_based && !ctx.embedder) {
    throw std::invalid_argument("generation-based scoring needs an embedder");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto calls_before = ctx.gateway.backend_calls();
  const auto hits_before = ctx.gateway.cache_hits();
  const auto embed_calls_before = ctx.embedder ? ctx.embedder->provider_calls() : 0;
  const auto embed_hits_before = ctx.embedder ? ctx.embedder->cache_hits() : 0;

  const auto& segments = set.segments();
  std::vector<std::optional<SegmentOutcome>> outcomes(segments.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> any_success{false};
  std::atomic<bool> abort{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::string abort_reason;

  auto worker = [&] {
    while (!abort.load()) {
      const auto i = next.fetch_add(1);
      if (i >= segments.size()) return;
      try {
        auto outcome = method == Method::generation_based ? generation_outcome(segments[i], ctx)
                                                          : direct_outcome(segments[i], ctx);
        if (outcome.cause == FailureCause::none) {
          any_success = true;
        } else if (outcome.cause == FailureCause::unreachable && !any_success.load()) {
          std::lock_guard lock(error_mutex);
          if (!abort.exchange(true)) abort_reason = outcome.score.detail;
        }
        outcomes[i] = std::move(outcome);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        abort = true;
      }
    }
  };

  {
    const auto n_workers = std::min(parallelism, std::max<std::size_t>(1, segments.size()));
    std::vector<std::jthread> workers;
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  if (abort) throw PipelineAborted("backend unreachable before any segment succeeded: " + abort_reason);

  EvaluationResult result;
  result.scores.reserve(segments.size());
  for (auto& o : outcomes) {
    result.scores.push_back(std::move(o->score));
    if (o->generation) result.generations.push_back(std::move(*o->generation));
  }

  auto& m = result.manifest;
  m.dataset = set.name();
  m.method = method;
  m.backend = ctx.gateway.spec();
  if (method == Method::generation_based) {
    m.embedder = ctx.embedder->spec();
    m.embedder_model = ctx.embedder->model_id();
    m.templates.push_back(template_label(*ctx.generation_template));
  } else {
    m.templates.push_back(template_label(*ctx.direct_template));
  }
  for (const auto& lp : set.language_pairs()) {
    PairCounts c;
    for (auto i : set.indices_for(lp)) {
      ++c.total;
      if (result.scores[i].valid) {
        ++c.scored;
      } else {
        ++c.failed;
      }
    }
    m.pairs.emplace_back(lp, c);
  }
  m.parallelism = parallelism;
  m.backend_calls = ctx.gateway.backend_calls() - calls_before;
  m.completion_cache_hits = ctx.gateway.cache_hits() - hits_before;
  if (ctx.embedder) {
    m.embedding_calls = ctx.embedder->provider_calls() - embed_calls_before;
    m.embedding_cache_hits = ctx.embedder->cache_hits() - embed_hits_before;
  }
  m.wall_time =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
  return result;
}

std::string generations_to_jsonl(const std::vector<GenerationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["id"] = r.segment_id;
    obj["status"] = to_string(r.status);
    obj["attempts"] = r.attempts;
    obj["reference"] = r.reference ? nlohmann::ordered_json(*r.reference) : nlohmann::ordered_json();
    obj["raw_output"] = r.raw_output;
    obj["backend_id"] = r.backend_id;
    obj["model_id"] = r.model_id;
    obj["prompt_sha256"] = r.prompt_hash;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace pseudoref::scoring
