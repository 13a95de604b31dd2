// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "pseudoref/csv.hpp"
#include "pseudoref/fileio.hpp"
#include "pseudoref/text.hpp"

namespace pseudoref::corpus {
namespace {

using Kind = CorpusError::Kind;

bool valid_code(std::string_view code) {
  if (code.size() < 2 || code.size() > 3) return false;
  for (char c : code) {
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'))) return false;
  }
  return true;
}

std::optional<double> parse_double(std::string_view text) {
  text = text::trim(text);
  if (text.empty()) return std::nullopt;
  // strtod accepts "nan"/"inf", which lets the caller report NonFiniteScore.
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return v;
}

Segment make_segment(std::size_t line, std::string id, std::string_view lp_text, std::string src,
                     std::string mt, double human, std::optional<std::string> system) {
  if (text::is_blank(id)) throw CorpusError(Kind::EmptyText, line, "empty id");
  if (text::is_blank(src)) throw CorpusError(Kind::EmptyText, line, "empty src");
  if (text::is_blank(mt)) throw CorpusError(Kind::EmptyText, line, "empty mt");
  if (!std::isfinite(human)) throw CorpusError(Kind::NonFiniteScore, line, "human_score is not finite");
  LanguagePair lp;
  try {
    lp = LanguagePair::parse(lp_text);
  } catch (const std::invalid_argument& e) {
    throw CorpusError(Kind::MalformedLine, line, e.what());
  }
  return Segment{std::move(id), lp, std::move(src), std::move(mt), human, std::move(system)};
}

void append_checked(std::vector<Segment>& out, std::map<std::string, std::size_t, std::less<>>& seen,
                    Segment seg, std::size_t line) {
  if (auto it = seen.find(seg.id); it != seen.end()) {
    throw CorpusError(Kind::DuplicateId, line,
                      "duplicate id '" + seg.id + "' (first seen on line " + std::to_string(it->second) + ")");
  }
  seen.emplace(seg.id, line);
  out.push_back(std::move(seg));
}

}  // namespace

LanguagePair::LanguagePair(std::string_view source, std::string_view target) {
  if (!valid_code(source) || !valid_code(target)) {
    throw std::invalid_argument("invalid language pair '" + std::string(source) + "-" + std::string(target) + "'");
  }
  source_ = text::ascii_lower(source);
  target_ = text::ascii_lower(target);
}

LanguagePair LanguagePair::parse(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) {
    throw std::invalid_argument("invalid language pair '" + std::string(text) + "'");
  }
  return LanguagePair(text.substr(0, dash), text.substr(dash + 1));
}

std::string LanguagePair::key() const { return source_ + "-" + target_; }
std::string LanguagePair::display() const { return text::ascii_upper(key()); }

EvaluationSet::EvaluationSet(std::string name, std::vector<Segment> segments)
    : name_(std::move(name)), segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!by_id_.emplace(segments_[i].id, i).second) {
      throw CorpusError(Kind::DuplicateId, 0, "duplicate id '" + segments_[i].id + "'");
    }
  }
}

std::vector<LanguagePair> EvaluationSet::language_pairs() const {
  std::vector<LanguagePair> pairs;
  for (const auto& seg : segments_) {
    if (std::find(pairs.begin(), pairs.end(), seg.lp) == pairs.end()) pairs.push_back(seg.lp);
  }
  return pairs;
}

std::vector<std::size_t> EvaluationSet::indices_for(const LanguagePair& lp) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (segments_[i].lp == lp) out.push_back(i);
  }
  return out;
}

const Segment* EvaluationSet::find(std::string_view id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &segments_[it->second];
}

std::string_view to_string(Statistic stat) {
  switch (stat) {
    case Statistic::rho: return "rho";
    case Statistic::r: return "r";
    case Statistic::tau: return "tau";
  }
  return "?";
}

std::optional<Statistic> parse_statistic(std::string_view text) {
  if (text == "rho") return Statistic::rho;
  if (text == "r") return Statistic::r;
  if (text == "tau") return Statistic::tau;
  return std::nullopt;
}

std::optional<double> MetricScoreSet::get(const LanguagePair& lp, Statistic stat) const {
  auto it = values.find({lp, stat});
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::optional<DataFormat> parse_format(std::string_view text) {
  if (text == "jsonl") return DataFormat::jsonl;
  if (text == "tsv") return DataFormat::tsv;
  return std::nullopt;
}

DataFormat format_from_extension(const std::filesystem::path& path) {
  return path.extension() == ".tsv" ? DataFormat::tsv : DataFormat::jsonl;
}

CorpusError::CorpusError(Kind kind, std::size_t line, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + (line ? " at line " + std::to_string(line) : std::string()) +
                         ": " + detail),
      kind_(kind),
      line_(line) {}

std::string_view to_string(CorpusError::Kind kind) {
  switch (kind) {
    case Kind::MissingField: return "MissingField";
    case Kind::EmptyText: return "EmptyText";
    case Kind::NonFiniteScore: return "NonFiniteScore";
    case Kind::DuplicateId: return "DuplicateId";
    case Kind::MalformedLine: return "MalformedLine";
    case Kind::UnknownStatistic: return "UnknownStatistic";
    case Kind::ValueOutOfRange: return "ValueOutOfRange";
    case Kind::DuplicateCell: return "DuplicateCell";
    case Kind::Io: return "Io";
  }
  return "?";
}

EvaluationSet load_evaluation_set(const std::filesystem::path& path, DataFormat format) {
  auto content = fileio::try_read_file(path);
  if (!content) throw CorpusError(Kind::Io, 0, "cannot read " + path.string());
  auto name = path.stem().string();
  return format == DataFormat::jsonl ? parse_jsonl(*content, std::move(name)) : parse_tsv(*content, std::move(name));
}

EvaluationSet parse_jsonl(std::string_view document, std::string name) {
  std::vector<Segment> segments;
  std::map<std::string, std::size_t, std::less<>> seen;
  const auto lines = text::split_lines(document);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (text::is_blank(lines[i])) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::out_of_range& e) {
      // A literal like 1e999 overflows to infinity.
      throw CorpusError(Kind::NonFiniteScore, line, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError(Kind::MalformedLine, line, e.what());
    }
    if (!obj.is_object()) throw CorpusError(Kind::MalformedLine, line, "expected a JSON object");
    for (const char* field : {"id", "lp", "src", "mt", "human_score"}) {
      if (!obj.contains(field) || obj[field].is_null()) {
        throw CorpusError(Kind::MissingField, line, std::string("missing field '") + field + "'");
      }
    }
    for (const char* field : {"id", "lp", "src", "mt"}) {
      if (!obj[field].is_string()) {
        throw CorpusError(Kind::MalformedLine, line, std::string("field '") + field + "' must be a string");
      }
    }
    if (!obj["human_score"].is_number()) {
      throw CorpusError(Kind::MalformedLine, line, "field 'human_score' must be a number");
    }
    std::optional<std::string> system;
    if (auto it = obj.find("system"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw CorpusError(Kind::MalformedLine, line, "field 'system' must be a string");
      system = it->get<std::string>();
    }
    auto seg = make_segment(line, obj["id"].get<std::string>(), obj["lp"].get<std::string>(),
                            obj["src"].get<std::string>(), obj["mt"].get<std::string>(),
                            obj["human_score"].get<double>(), std::move(system));
    append_checked(segments, seen, std::move(seg), line);
  }
  return EvaluationSet(std::move(name), std::move(segments));
}

EvaluationSet parse_tsv(std::string_view document, std::string name) {
  static const std::vector<std::string_view> kColumns = {"id", "lp", "src", "mt", "human_score", "system"};
  const auto lines = text::split_lines(document);
  if (lines.empty() || text::is_blank(lines[0])) throw CorpusError(Kind::MissingField, 1, "missing header row");

  std::vector<std::string_view> header;
  for (std::size_t pos = 0;;) {
    auto tab = lines[0].find('\t', pos);
    header.push_back(lines[0].substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  if (header.size() < 5 || header.size() > 6) {
    throw CorpusError(Kind::MalformedLine, 1, "header must list id, lp, src, mt, human_score[, system]");
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (text::trim(header[c]) != kColumns[c]) {
      throw CorpusError(Kind::MalformedLine, 1,
                        "header column " + std::to_string(c + 1) + " must be '" + std::string(kColumns[c]) + "'");
    }
  }

  std::vector<Segment> segments;
  std::map<std::string, std::size_t, std::less<>> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (text::is_blank(lines[i])) continue;
    std::vector<std::string> cells;
    for (std::size_t pos = 0;;) {
      auto tab = lines[i].find('\t', pos);
      cells.emplace_back(lines[i].substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
      if (tab == std::string_view::npos) break;
      pos = tab + 1;
    }
    if (cells.size() < 5) {
      throw CorpusError(Kind::MalformedLine, line, "expected at least 5 tab-separated columns, got " +
                                                       std::to_string(cells.size()));
    }
    if (cells.size() > header.size()) {
      throw CorpusError(Kind::MalformedLine, line, "more columns than the header declares");
    }
    for (std::size_t c = 0; c < 5; ++c) {
      if (cells[c].empty()) {
        throw CorpusError(Kind::MissingField, line, "missing field '" + std::string(kColumns[c]) + "'");
      }
    }
    const auto human = parse_double(cells[4]);
    if (!human) throw CorpusError(Kind::MalformedLine, line, "human_score is not a number: '" + cells[4] + "'");
    std::optional<std::string> system;
    if (cells.size() == 6 && !cells[5].empty()) system = cells[5];
    auto seg = make_segment(line, cells[0], cells[1], cells[2], cells[3], *human, std::move(system));
    append_checked(segments, seen, std::move(seg), line);
  }
  return EvaluationSet(std::move(name), std::move(segments));
}

std::string to_jsonl(const EvaluationSet& set) {
  std::string out;
  for (const auto& seg : set.segments()) {
    nlohmann::ordered_json obj;
    obj["id"] = seg.id;
    obj["lp"] = seg.lp.key();
    obj["src"] = seg.src;
    obj["mt"] = seg.mt;
    obj["human_score"] = seg.human_score;
    if (seg.system) obj["system"] = *seg.system;
    out += obj.dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<MetricScoreSet> load_metric_scores(const std::filesystem::path& path) {
  auto content = fileio::try_read_file(path);
  if (!content) throw CorpusError(Kind::Io, 0, "cannot read " + path.string());
  return parse_metric_scores(*content);
}

std::vector<MetricScoreSet> parse_metric_scores(std::string_view document) {
  std::vector<csv::Record> records;
  try {
    records = csv::parse(document);
  } catch (const csv::ParseError& e) {
    throw CorpusError(Kind::MalformedLine, e.line(), e.what());
  }
  if (records.empty()) throw CorpusError(Kind::MissingField, 1, "missing header row");
  const std::vector<std::string> expected = {"metric", "ref_mode", "lp", "stat", "value"};
  if (records[0].fields != expected) {
    throw CorpusError(Kind::MalformedLine, records[0].line, "header must be metric,ref_mode,lp,stat,value");
  }

  std::vector<MetricScoreSet> sets;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.fields.size() != 5) {
      throw CorpusError(Kind::MalformedLine, rec.line, "expected 5 fields, got " + std::to_string(rec.fields.size()));
    }
    const auto& metric = rec.fields[0];
    if (text::is_blank(metric)) throw CorpusError(Kind::MissingField, rec.line, "empty metric name");
    const auto& mode = rec.fields[1];
    if (mode != "noref" && mode != "ref") {
      throw CorpusError(Kind::MalformedLine, rec.line, "ref_mode must be 'noref' or 'ref', got '" + mode + "'");
    }
    LanguagePair lp;
    try {
      lp = LanguagePair::parse(rec.fields[2]);
    } catch (const std::invalid_argument& e) {
      throw CorpusError(Kind::MalformedLine, rec.line, e.what());
    }
    const auto stat = parse_statistic(rec.fields[3]);
    if (!stat) throw CorpusError(Kind::UnknownStatistic, rec.line, "unknown statistic '" + rec.fields[3] + "'");
    const auto value = parse_double(rec.fields[4]);
    if (!value) throw CorpusError(Kind::MalformedLine, rec.line, "value is not a number: '" + rec.fields[4] + "'");
    if (!std::isfinite(*value) || std::fabs(*value) > 1.0) {
      throw CorpusError(Kind::ValueOutOfRange, rec.line, "correlation value " + rec.fields[4] + " outside [-1, 1]");
    }

    auto it = std::find_if(sets.begin(), sets.end(), [&](const auto& s) { return s.metric_name == metric; });
    if (it == sets.end()) {
      sets.push_back(MetricScoreSet{metric, mode == "noref", {}});
      it = std::prev(sets.end());
    } else if (it->reference_free != (mode == "noref")) {
      throw CorpusError(Kind::MalformedLine, rec.line, "metric '" + metric + "' listed with both ref modes");
    }
    if (!it->values.emplace(std::make_pair(lp, *stat), *value).second) {
      throw CorpusError(Kind::DuplicateCell, rec.line,
                        "duplicate cell " + metric + "/" + lp.key() + "/" + std::string(to_string(*stat)));
    }
  }
  return sets;
}

}  // namespace pseudoref::corpus
