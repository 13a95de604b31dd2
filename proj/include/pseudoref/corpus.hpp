// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pseudoref::corpus {

/// Source/target language codes, stored lowercase.
class LanguagePair {
 public:
  LanguagePair() = default;
  /// Throws std::invalid_argument unless both codes are 2-3 ASCII letters.
  LanguagePair(std::string_view source, std::string_view target);

  /// Parses "src-tgt" in any letter case.
  static LanguagePair parse(std::string_view text);

  const std::string& source() const { return source_; }
  const std::string& target() const { return target_; }

  /// "ne-en"
  std::string key() const;
  /// "NE-EN"
  std::string display() const;

  auto operator<=>(const LanguagePair&) const = default;

 private:
  std::string source_;
  std::string target_;
};

struct Segment {
  std::string id;
  LanguagePair lp;
  std::string src;
  std::string mt;
  double human_score = 0.0;
  std::optional<std::string> system;

  bool operator==(const Segment&) const = default;
};

class EvaluationSet {
 public:
  EvaluationSet() = default;
  /// Throws CorpusError(DuplicateId) when ids collide.
  EvaluationSet(std::string name, std::vector<Segment> segments);

  const std::string& name() const { return name_; }
  const std::vector<Segment>& segments() const { return segments_; }
  std::size_t size() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  /// Distinct pairs in order of first appearance.
  std::vector<LanguagePair> language_pairs() const;
  /// Indices into segments() for one pair, in dataset order.
  std::vector<std::size_t> indices_for(const LanguagePair& lp) const;
  const Segment* find(std::string_view id) const;

  bool operator==(const EvaluationSet& other) const {
    return name_ == other.name_ && segments_ == other.segments_;
  }

 private:
  std::string name_;
  std::vector<Segment> segments_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

enum class Statistic { rho, r, tau };

std::string_view to_string(Statistic stat);
std::optional<Statistic> parse_statistic(std::string_view text);

struct MetricScoreSet {
  std::string metric_name;
  bool reference_free = false;
  std::map<std::pair<LanguagePair, Statistic>, double> values;

  std::optional<double> get(const LanguagePair& lp, Statistic stat) const;
};

enum class DataFormat { jsonl, tsv };

std::optional<DataFormat> parse_format(std::string_view text);
/// Guesses from the extension: ".tsv" is TSV, everything else JSONL.
DataFormat format_from_extension(const std::filesystem::path& path);

class CorpusError : public std::runtime_error {
 public:
  enum class Kind {
    MissingField,
    EmptyText,
    NonFiniteScore,
    DuplicateId,
    MalformedLine,
    UnknownStatistic,
    ValueOutOfRange,
    DuplicateCell,
    Io,
  };

  CorpusError(Kind kind, std::size_t line, const std::string& detail);

  Kind kind() const { return kind_; }
  /// 1-based line number; 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

std::string_view to_string(CorpusError::Kind kind);

EvaluationSet load_evaluation_set(const std::filesystem::path& path, DataFormat format);
EvaluationSet parse_jsonl(std::string_view document, std::string name);
EvaluationSet parse_tsv(std::string_view document, std::string name);

/// Serializes in the JSONL input format; parse_jsonl(to_jsonl(s)) == s.
std::string to_jsonl(const EvaluationSet& set);

std::vector<MetricScoreSet> load_metric_scores(const std::filesystem::path& path);
std::vector<MetricScoreSet> parse_metric_scores(std::string_view document);

}  // namespace pseudoref::corpus
