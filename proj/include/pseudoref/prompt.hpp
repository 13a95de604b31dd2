// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pseudoref::prompt {

enum class TemplateId { generation, direct_scoring };

std::string_view to_string(TemplateId id);

/// Placeholder names a template body may use.
inline constexpr std::string_view kPlaceholders[] = {"src", "src_lang", "tgt_lang", "translation"};

using Values = std::map<std::string, std::string, std::less<>>;

class PromptError : public std::runtime_error {
 public:
  enum class Kind { EmptySource, EmptyArgument, MissingPlaceholderValue, UnknownPlaceholder, Io };

  PromptError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class PromptTemplate {
 public:
  /// Normalizes line endings to "\n"; throws PromptError(UnknownPlaceholder)
  /// if the body names a placeholder outside kPlaceholders.
  PromptTemplate(TemplateId id, std::string body);

  /// Built-in bodies, byte-identical to prompts/*.txt.
  static const PromptTemplate& builtin(TemplateId id);
  static PromptTemplate from_file(TemplateId id, const std::filesystem::path& path);

  TemplateId id() const { return id_; }
  const std::string& body() const { return body_; }
  /// True if the body contains the {name} token.
  bool uses(std::string_view name) const;

 private:
  TemplateId id_;
  std::string body_;
};

struct RenderedPrompt {
  std::string text;
  TemplateId template_id = TemplateId::generation;
  Values placeholder_values;
};

/// Single left-to-right pass; substituted values are never re-expanded.
/// Every supplied key must appear in the body and vice versa.
RenderedPrompt render_template(const PromptTemplate& tpl, const Values& values);

RenderedPrompt build_generation_prompt(std::string_view src,
                                       const PromptTemplate& tpl = PromptTemplate::builtin(TemplateId::generation));

RenderedPrompt build_direct_scoring_prompt(
    std::string_view src_lang, std::string_view tgt_lang, std::string_view translation,
    const PromptTemplate& tpl = PromptTemplate::builtin(TemplateId::direct_scoring));

/// A direct-scoring template that also shows the source sentence; the
/// built-in one does not.
RenderedPrompt build_direct_scoring_prompt(std::string_view src_lang, std::string_view tgt_lang,
                                           std::string_view src, std::string_view translation,
                                           const PromptTemplate& tpl);

}  // namespace pseudoref::prompt
