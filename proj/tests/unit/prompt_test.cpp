// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/prompt.hpp"

#include <random>

#include <gtest/gtest.h>

#include "pseudoref/fileio.hpp"
#include "unit/test_support.hpp"

namespace pseudoref::prompt {
namespace {

using pseudoref::testing::source_dir;
using pseudoref::testing::TempDir;

PromptError::Kind error_kind(auto&& fn) {
  try {
    fn();
  } catch (const PromptError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no PromptError";
  return PromptError::Kind::Io;
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

TEST(Builtin, MatchesShippedTemplateFiles) {
  EXPECT_EQ(PromptTemplate::builtin(TemplateId::generation).body(),
            fileio::read_file(source_dir() / "prompts/generation_fig2.txt"));
  EXPECT_EQ(PromptTemplate::builtin(TemplateId::direct_scoring).body(),
            fileio::read_file(source_dir() / "prompts/direct_scoring_fig1.txt"));
}

TEST(Builtin, TemplateTextDetails) {
  const auto& gen = PromptTemplate::builtin(TemplateId::generation).body();
  EXPECT_NE(gen.find("'all-mpnet-base-v2'"), std::string::npos);
  EXPECT_NE(gen.find("exactly one clean English sentence"), std::string::npos);
  const auto& direct = PromptTemplate::builtin(TemplateId::direct_scoring);
  EXPECT_FALSE(direct.uses("src"));
  EXPECT_TRUE(direct.uses("src_lang"));
  EXPECT_TRUE(direct.uses("translation"));
  EXPECT_NE(direct.body().find("on a continuous scale from 0 to 100"), std::string::npos);
}

TEST(Generation, EndsWithSentenceAndTranslationLines) {
  const auto p = build_generation_prompt("Guten Morgen.");
  EXPECT_TRUE(p.text.ends_with("Sentence: Guten Morgen.\nTranslation:"));
  EXPECT_EQ(p.template_id, TemplateId::generation);
  EXPECT_EQ(p.placeholder_values.at("src"), "Guten Morgen.");
}

TEST(Generation, EmptySourceRejected) {
  EXPECT_EQ(error_kind([] { build_generation_prompt(""); }), PromptError::Kind::EmptySource);
  EXPECT_EQ(error_kind([] { build_generation_prompt(" \n"); }), PromptError::Kind::EmptySource);
}

TEST(Generation, LiteralPlaceholderInSourceSurvives) {
  const auto p = build_generation_prompt("keep {src} and {translation}");
  EXPECT_TRUE(p.text.ends_with("Sentence: keep {src} and {translation}\nTranslation:"));
}

TEST(Generation, ExactlyOneSentenceLine) {
  for (std::string src : {"a", "Sentence: nested", "multi word source text", "नमस्ते"}) {
    const auto p = build_generation_prompt(src);
    EXPECT_EQ(count(p.text, "\nSentence: "), 1u) << src;
    EXPECT_TRUE(p.text.ends_with("\nTranslation:"));
    EXPECT_EQ(count(p.text, "\nTranslation:"), 1u);
  }
}

TEST(DirectScoring, BuiltinRendering) {
  const auto p = build_direct_scoring_prompt("Nepali", "English", "Hello.");
  EXPECT_NE(p.text.find("English translation: \"Hello.\""), std::string::npos);
  EXPECT_NE(p.text.find("from Nepali to English"), std::string::npos);
  EXPECT_TRUE(p.text.ends_with("Score (0-100):"));
}

TEST(DirectScoring, ArgumentsChecked) {
  EXPECT_EQ(error_kind([] { build_direct_scoring_prompt("", "English", "x"); }), PromptError::Kind::EmptyArgument);
  EXPECT_EQ(error_kind([] { build_direct_scoring_prompt("Nepali", "", "x"); }), PromptError::Kind::EmptyArgument);
  EXPECT_EQ(error_kind([] { build_direct_scoring_prompt("Nepali", "English", ""); }), PromptError::Kind::EmptyArgument);
}

TEST(DirectScoring, QuotesEmbeddedVerbatim) {
  const auto p = build_direct_scoring_prompt("German", "English", "He said \"no\".");
  EXPECT_NE(p.text.find("English translation: \"He said \"no\".\""), std::string::npos);
}

TEST(DirectScoring, SourceInclusiveVariant) {
  const PromptTemplate tpl(TemplateId::direct_scoring, "{src_lang} source: {src}\n{tgt_lang}: {translation}\nScore (0-100):");
  const auto p = build_direct_scoring_prompt("German", "English", "Hallo", "Hello", tpl);
  EXPECT_EQ(p.text, "German source: Hallo\nEnglish: Hello\nScore (0-100):");
}

TEST(Render, Examples) {
  const PromptTemplate tpl(TemplateId::generation, "A {src} B");
  EXPECT_EQ(render_template(tpl, {{"src", "x"}}).text, "A x B");
  EXPECT_EQ(error_kind([&] { render_template(tpl, {}); }), PromptError::Kind::MissingPlaceholderValue);
  EXPECT_EQ(error_kind([&] { render_template(tpl, {{"src", "x"}, {"tgt_lang", "y"}}); }),
            PromptError::Kind::UnknownPlaceholder);
}

TEST(Render, UnknownPlaceholderInBody) {
  EXPECT_EQ(error_kind([] { PromptTemplate(TemplateId::generation, "say {language}"); }),
            PromptError::Kind::UnknownPlaceholder);
  // Braces that do not form an identifier token are plain text.
  EXPECT_EQ(render_template(PromptTemplate(TemplateId::generation, "{ } {1} {{src}}"), {{"src", "v"}}).text,
            "{ } {1} {v}");
}

TEST(Render, LineEndingsNormalized) {
  const PromptTemplate tpl(TemplateId::generation, "a\r\nSentence: {src}\r\nTranslation:");
  EXPECT_EQ(tpl.body(), "a\nSentence: {src}\nTranslation:");
}

TEST(Render, LengthAdditive) {
  std::mt19937 rng(42);
  const std::string alphabet = "ab {}_\nxé";
  std::uniform_int_distribution<std::size_t> len(0, 12);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  const auto random_text = [&] {
    std::string s;
    for (auto n = len(rng); n > 0; --n) s.push_back(alphabet[pick(rng)]);
    return s;
  };
  const std::string body = "{src_lang}->{tgt_lang}: {translation} / {translation} [{src}]";
  const PromptTemplate tpl(TemplateId::direct_scoring, body);
  for (int i = 0; i < 200; ++i) {
    Values v{{"src", random_text()}, {"src_lang", random_text()}, {"tgt_lang", random_text()},
             {"translation", random_text()}};
    std::size_t expected = body.size();
    for (const auto& [name, value] : v) {
      const auto occurrences = count(body, "{" + name + "}");
      expected = expected - occurrences * (name.size() + 2) + occurrences * value.size();
    }
    const auto a = render_template(tpl, v);
    EXPECT_EQ(a.text.size(), expected);
    EXPECT_EQ(render_template(tpl, v).text, a.text);
  }
}

TEST(FromFile, LoadsAndValidates) {
  TempDir dir;
  fileio::write_file_atomic(dir / "t.txt", "Translate: {src}\r\nTranslation:");
  const auto tpl = PromptTemplate::from_file(TemplateId::generation, dir / "t.txt");
  EXPECT_EQ(build_generation_prompt("x", tpl).text, "Translate: x\nTranslation:");
  EXPECT_EQ(error_kind([&] { PromptTemplate::from_file(TemplateId::generation, dir / "missing.txt"); }),
            PromptError::Kind::Io);
}

}  // namespace
}  // namespace pseudoref::prompt
