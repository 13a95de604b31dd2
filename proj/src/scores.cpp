// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/scores.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "pseudoref/text.hpp"

namespace pseudoref::scoring {

std::string_view to_string(Method method) {
  return method == Method::generation_based ? "generation_based" : "direct_scoring";
}

std::optional<Method> parse_method(std::string_view text) {
  if (text == "generation" || text == "generation_based") return Method::generation_based;
  if (text == "direct" || text == "direct_scoring") return Method::direct_scoring;
  return std::nullopt;
}

std::string scores_to_jsonl(const corpus::EvaluationSet& set, const std::vector<QualityScore>& scores) {
  std::string out;
  for (const auto& score : scores) {
    const auto* seg = set.find(score.segment_id);
    if (!seg) throw ScoreFileError(0, "score for unknown segment '" + score.segment_id + "'");
    nlohmann::ordered_json obj;
    obj["id"] = score.segment_id;
    obj["lp"] = seg->lp.key();
    obj["method"] = to_string(score.method);
    obj["value"] = score.valid && score.value ? nlohmann::ordered_json(*score.value) : nlohmann::ordered_json();
    obj["valid"] = score.valid;
    obj["detail"] = score.detail;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<QualityScore> parse_scores_jsonl(std::string_view document) {
  std::vector<QualityScore> scores;
  std::set<std::string, std::less<>> seen;
  const auto lines = text::split_lines(document);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = i + 1;
    if (text::is_blank(lines[i])) continue;
    try {
      const auto obj = nlohmann::json::parse(lines[i]);
      QualityScore s;
      s.segment_id = obj.at("id").get<std::string>();
      const auto method = parse_method(obj.at("method").get<std::string>());
      if (!method) throw ScoreFileError(line, "unknown method");
      s.method = *method;
      s.valid = obj.at("valid").get<bool>();
      s.detail = obj.value("detail", "");
      const auto& value = obj.at("value");
      if (!value.is_null()) s.value = value.get<double>();
      if (s.valid != s.value.has_value()) throw ScoreFileError(line, "'valid' disagrees with 'value'");
      if (s.value) {
        const double lo = s.method == Method::generation_based ? -1.0 : 0.0;
        const double hi = s.method == Method::generation_based ? 1.0 : 100.0;
        if (!std::isfinite(*s.value) || *s.value < lo || *s.value > hi) {
          throw ScoreFileError(line, "value out of range for method " + std::string(to_string(s.method)));
        }
      }
      if (!seen.insert(s.segment_id).second) throw ScoreFileError(line, "duplicate id '" + s.segment_id + "'");
      scores.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ScoreFileError(line, e.what());
    }
  }
  return scores;
}

}  // namespace pseudoref::scoring
