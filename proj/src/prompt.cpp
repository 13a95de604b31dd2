// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/prompt.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "pseudoref/fileio.hpp"
#include "pseudoref/text.hpp"

namespace pseudoref::prompt {
namespace {

using Kind = PromptError::Kind;

constexpr std::string_view kGenerationBody =
    "You are a certified WMT benchmark translator. Translate the following sentence from the WMT22 dataset "
    "into English. Your translation will be directly compared to WMT system outputs using the "
    "'all-mpnet-base-v2' semantic similarity model. To ensure accurate benchmarking, provide exactly one "
    "clean English sentence—no alternative translations, explanations, or additional text.\n"
    "Sentence: {src}\n"
    "Translation:";

constexpr std::string_view kDirectScoringBody =
    "Score the following translation from {src_lang} to {tgt_lang} on a continuous scale from 0 to 100 that "
    "starts on \"No meaning preserved\", goes through \"Some meaning preserved\", then \"Most meaning "
    "preserved and few grammar mistakes\", up to \"Perfect meaning and grammar\".\n"
    "{tgt_lang} translation: \"{translation}\"\n"
    "Score (0-100):";

bool is_placeholder(std::string_view name) {
  return std::find(std::begin(kPlaceholders), std::end(kPlaceholders), name) != std::end(kPlaceholders);
}

bool is_identifier_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

// A "{name}" token starting at `pos`, where name is a lowercase identifier.
// Other brace usage is literal text.
std::optional<std::string_view> token_at(std::string_view body, std::size_t pos) {
  if (body[pos] != '{' || pos + 1 >= body.size() || body[pos + 1] < 'a' || body[pos + 1] > 'z') return std::nullopt;
  std::size_t end = pos + 1;
  while (end < body.size() && is_identifier_char(body[end])) ++end;
  if (end == pos + 1 || end >= body.size() || body[end] != '}') return std::nullopt;
  return body.substr(pos + 1, end - pos - 1);
}

}  // namespace

std::string_view to_string(TemplateId id) {
  return id == TemplateId::generation ? "generation_fig2" : "direct_scoring_fig1";
}

PromptError::PromptError(Kind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}

PromptTemplate::PromptTemplate(TemplateId id, std::string body) : id_(id), body_(text::normalize_newlines(body)) {
  for (std::size_t pos = 0; pos < body_.size(); ++pos) {
    if (auto name = token_at(body_, pos); name && !is_placeholder(*name)) {
      throw PromptError(Kind::UnknownPlaceholder, "template uses unknown placeholder {" + std::string(*name) + "}");
    }
  }
}

const PromptTemplate& PromptTemplate::builtin(TemplateId id) {
  static const PromptTemplate generation(TemplateId::generation, std::string(kGenerationBody));
  static const PromptTemplate direct(TemplateId::direct_scoring, std::string(kDirectScoringBody));
  return id == TemplateId::generation ? generation : direct;
}

PromptTemplate PromptTemplate::from_file(TemplateId id, const std::filesystem::path& path) {
  auto body = fileio::try_read_file(path);
  if (!body) throw PromptError(Kind::Io, "cannot read prompt file " + path.string());
  return PromptTemplate(id, std::move(*body));
}

bool PromptTemplate::uses(std::string_view name) const {
  for (std::size_t pos = 0; pos < body_.size(); ++pos) {
    if (auto token = token_at(body_, pos); token && *token == name) return true;
  }
  return false;
}

RenderedPrompt render_template(const PromptTemplate& tpl, const Values& values) {
  const std::string_view body = tpl.body();
  std::set<std::string, std::less<>> used;
  std::string out;
  out.reserve(body.size());
  for (std::size_t pos = 0; pos < body.size();) {
    if (auto name = token_at(body, pos)) {
      auto it = values.find(*name);
      if (it == values.end()) {
        throw PromptError(Kind::MissingPlaceholderValue, "no value for placeholder {" + std::string(*name) + "}");
      }
      out += it->second;
      used.emplace(*name);
      pos += name->size() + 2;
    } else {
      out.push_back(body[pos]);
      ++pos;
    }
  }
  for (const auto& [key, value] : values) {
    if (!used.contains(key)) {
      throw PromptError(Kind::UnknownPlaceholder, "value supplied for placeholder {" + key + "} not in template");
    }
  }
  return RenderedPrompt{std::move(out), tpl.id(), values};
}

RenderedPrompt build_generation_prompt(std::string_view src, const PromptTemplate& tpl) {
  if (text::is_blank(src)) throw PromptError(Kind::EmptySource, "source text is empty");
  return render_template(tpl, {{"src", std::string(src)}});
}

RenderedPrompt build_direct_scoring_prompt(std::string_view src_lang, std::string_view tgt_lang,
                                           std::string_view translation, const PromptTemplate& tpl) {
  if (src_lang.empty() || tgt_lang.empty() || translation.empty()) {
    throw PromptError(Kind::EmptyArgument, "direct-scoring prompt arguments must be non-empty");
  }
  return render_template(tpl, {{"src_lang", std::string(src_lang)},
                               {"tgt_lang", std::string(tgt_lang)},
                               {"translation", std::string(translation)}});
}

RenderedPrompt build_direct_scoring_prompt(std::string_view src_lang, std::string_view tgt_lang,
                                           std::string_view src, std::string_view translation,
                                           const PromptTemplate& tpl) {
  if (src_lang.empty() || tgt_lang.empty() || src.empty() || translation.empty()) {
    throw PromptError(Kind::EmptyArgument, "direct-scoring prompt arguments must be non-empty");
  }
  return render_template(tpl, {{"src_lang", std::string(src_lang)},
                               {"tgt_lang", std::string(tgt_lang)},
                               {"src", std::string(src)},
                               {"translation", std::string(translation)}});
}

}  // namespace pseudoref::prompt
