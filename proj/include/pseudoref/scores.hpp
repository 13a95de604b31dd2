// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pseudoref/corpus.hpp"

namespace pseudoref::scoring {

enum class Method { generation_based, direct_scoring };

std::string_view to_string(Method method);
/// Accepts "generation"/"generation_based" and "direct"/"direct_scoring".
std::optional<Method> parse_method(std::string_view text);

/// Invariants: a valid generation-based value lies in [-1, 1], a valid direct
/// score in [0, 100]; invalid scores carry no value.
struct QualityScore {
  std::string segment_id;
  Method method = Method::generation_based;
  std::optional<double> value;
  bool valid = false;
  std::string detail;

  bool operator==(const QualityScore&) const = default;
};

class ScoreFileError : public std::runtime_error {
 public:
  ScoreFileError(std::size_t line, const std::string& detail)
      : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) + detail), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// One JSON object per score: {id, lp, method, value|null, valid, detail}.
/// Scores must refer to segments of `set`.
std::string scores_to_jsonl(const corpus::EvaluationSet& set, const std::vector<QualityScore>& scores);

/// Checks the invariants above; ids must be unique.
std::vector<QualityScore> parse_scores_jsonl(std::string_view document);

}  // namespace pseudoref::scoring
