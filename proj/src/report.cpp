// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/report.hpp"

#include <algorithm>
#include <set>

#include "pseudoref/csv.hpp"

namespace pseudoref::report {
namespace {

using Kind = ReportError::Kind;
using corpus::LanguagePair;
using corpus::Statistic;

constexpr std::string_view kAbsent = "—";

std::optional<long> growth(const std::optional<double>& ours, const std::optional<double>& base) {
  if (!ours || !base || *base == 0.0) return std::nullopt;
  return stats::growth_percent(*ours, *base);
}

std::string cell(const std::optional<double>& v, Format format) {
  if (!v) return format == Format::markdown ? std::string(kAbsent) : std::string();
  return stats::format3(*v);
}

std::string growth_cell(const std::optional<long>& g, Format format) {
  if (!g) return format == Format::markdown ? std::string(kAbsent) : std::string();
  return stats::format_growth(*g);
}

std::string_view symbol(Statistic stat) {
  switch (stat) {
    case Statistic::rho: return "ρ";
    case Statistic::r: return "r";
    case Statistic::tau: return "τ";
  }
  return "?";
}

std::string markdown_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  out += "\n";
  return out;
}

std::string markdown_rule(std::size_t label_columns, std::size_t numeric_columns) {
  std::string out = "|";
  for (std::size_t i = 0; i < label_columns; ++i) out += " --- |";
  for (std::size_t i = 0; i < numeric_columns; ++i) out += " ---: |";
  out += "\n";
  return out;
}

void check_unique_pairs(std::span<const LanguagePair> pairs) {
  std::set<LanguagePair> seen;
  for (const auto& lp : pairs) {
    if (!seen.insert(lp).second) throw ReportError(Kind::InconsistentColumns, "pair " + lp.display() + " requested twice");
  }
}

std::vector<double> metric_values(std::span<const corpus::MetricScoreSet> sets, const LanguagePair& lp, Statistic stat) {
  std::vector<double> values;
  for (const auto& set : sets) {
    if (auto v = set.get(lp, stat)) values.push_back(*v);
  }
  return values;
}

}  // namespace

ReportError::ReportError(Kind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}

std::optional<long> PairCells::rho_growth() const { return growth(rho_ours, rho_base); }
std::optional<long> PairCells::r_growth() const { return growth(r_ours, r_base); }

std::string render_experiment1(std::span<const Experiment1Row> rows, std::span<const LanguagePair> pairs,
                               Format format) {
  check_unique_pairs(pairs);
  for (const auto& row : rows) {
    for (const auto& [lp, cells] : row.pairs) {
      if (std::find(pairs.begin(), pairs.end(), lp) == pairs.end()) {
        throw ReportError(Kind::InconsistentColumns,
                          "row '" + row.model_label + "' has pair " + lp.display() + " outside the requested columns");
      }
    }
  }

  std::string out;
  if (format == Format::csv) {
    out += csv::join_row({"model", "lp", "rho_ours", "r_ours", "rho_base", "r_base", "rho_growth", "r_growth"});
    for (const auto& row : rows) {
      for (const auto& lp : pairs) {
        const auto it = row.pairs.find(lp);
        const PairCells c = it == row.pairs.end() ? PairCells{} : it->second;
        out += csv::join_row({row.model_label, lp.display(), cell(c.rho_ours, format), cell(c.r_ours, format),
                              cell(c.rho_base, format), cell(c.r_base, format), growth_cell(c.rho_growth(), format),
                              growth_cell(c.r_growth(), format)});
      }
    }
    return out;
  }

  std::vector<std::string> header = {"Model", ""};
  for (const auto& lp : pairs) {
    header.push_back(lp.display() + " ρ");
    header.push_back(lp.display() + " r");
  }
  out += markdown_row(header);
  out += markdown_rule(2, 2 * pairs.size());
  for (const auto& row : rows) {
    std::vector<std::string> ours = {row.model_label, "ours"};
    std::vector<std::string> base = {"", "baseline"};
    std::vector<std::string> grow = {"", "growth"};
    for (const auto& lp : pairs) {
      const auto it = row.pairs.find(lp);
      const PairCells c = it == row.pairs.end() ? PairCells{} : it->second;
      ours.push_back(cell(c.rho_ours, format));
      ours.push_back(cell(c.r_ours, format));
      base.push_back(cell(c.rho_base, format));
      base.push_back(cell(c.r_base, format));
      grow.push_back(growth_cell(c.rho_growth(), format));
      grow.push_back(growth_cell(c.r_growth(), format));
    }
    out += markdown_row(ours);
    out += markdown_row(base);
    out += markdown_row(grow);
  }
  return out;
}

stats::ComparisonCell compare_cell(double ours, std::span<const corpus::MetricScoreSet> metric_sets,
                                   const LanguagePair& lp, Statistic stat) {
  const auto values = metric_values(metric_sets, lp, stat);
  if (values.empty()) {
    throw ReportError(Kind::MissingMetricValues, "no metric set has " + lp.display() + " " +
                                                     std::string(corpus::to_string(stat)));
  }
  return stats::compare_to_metric_set(ours, values);
}

std::string render_experiment2(std::span<const Experiment2Row> ours_rows,
                               std::span<const corpus::MetricScoreSet> metric_sets,
                               std::span<const LanguagePair> pairs, std::span<const Statistic> statistics,
                               Format format) {
  check_unique_pairs(pairs);
  for (const auto& set : metric_sets) {
    if (!set.reference_free) {
      throw ReportError(Kind::NotReferenceFree, "metric set '" + set.metric_name + "' is reference-based");
    }
  }
  std::vector<CellKey> columns;
  for (const auto& lp : pairs) {
    for (auto stat : statistics) {
      if (metric_values(metric_sets, lp, stat).empty()) {
        throw ReportError(Kind::MissingMetricValues, "no metric set has " + lp.display() + " " +
                                                         std::string(corpus::to_string(stat)));
      }
      columns.emplace_back(lp, stat);
    }
  }

  const auto summary = [&](const CellKey& key, stats::Aggregate agg) {
    const auto values = metric_values(metric_sets, key.first, key.second);
    return stats::aggregate(values, agg);
  };

  std::string out;
  if (format == Format::csv) {
    out += csv::join_row({"group", "system", "lp", "stat", "value", "exceeds_mean", "exceeds_median", "exceeds_best"});
    for (const auto& row : ours_rows) {
      for (const auto& key : columns) {
        const auto it = row.values.find(key);
        std::vector<std::string> fields = {"ours", row.system_label, key.first.display(),
                                           std::string(corpus::to_string(key.second))};
        if (it == row.values.end()) {
          fields.insert(fields.end(), {"", "", "", ""});
        } else {
          const auto flags = compare_cell(it->second, metric_sets, key.first, key.second);
          fields.push_back(stats::format3(it->second));
          fields.push_back(flags.exceeds_mean ? "true" : "false");
          fields.push_back(flags.exceeds_median ? "true" : "false");
          fields.push_back(flags.exceeds_best ? "true" : "false");
        }
        out += csv::join_row(fields);
      }
    }
    for (auto [label, agg] : {std::pair{"median", stats::Aggregate::median}, std::pair{"mean", stats::Aggregate::mean}}) {
      for (const auto& key : columns) {
        out += csv::join_row({"summary", label, key.first.display(), std::string(corpus::to_string(key.second)),
                              stats::format3(summary(key, agg)), "", "", ""});
      }
    }
    for (const auto& set : metric_sets) {
      for (const auto& key : columns) {
        const auto v = set.get(key.first, key.second);
        out += csv::join_row({"noref", set.metric_name, key.first.display(), std::string(corpus::to_string(key.second)),
                              v ? stats::format3(*v) : std::string(), "", "", ""});
      }
    }
    return out;
  }

  std::vector<std::string> header = {"", "System"};
  for (const auto& [lp, stat] : columns) header.push_back(lp.display() + " " + std::string(symbol(stat)));
  out += markdown_row(header);
  out += markdown_rule(2, columns.size());
  for (std::size_t i = 0; i < ours_rows.size(); ++i) {
    const auto& row = ours_rows[i];
    std::vector<std::string> cells = {i == 0 ? "ours" : "", row.system_label};
    for (const auto& key : columns) {
      const auto it = row.values.find(key);
      if (it == row.values.end()) {
        cells.emplace_back(kAbsent);
        continue;
      }
      const auto flags = compare_cell(it->second, metric_sets, key.first, key.second);
      const auto text = stats::format3(it->second);
      cells.push_back(flags.exceeds_mean ? "**" + text + "**" : text);
    }
    out += markdown_row(cells);
  }
  for (auto [label, agg] : {std::pair{"median", stats::Aggregate::median}, std::pair{"mean", stats::Aggregate::mean}}) {
    std::vector<std::string> cells = {label == std::string_view("median") ? "mtme [noref]" : "", label};
    for (const auto& key : columns) cells.push_back(stats::format3(summary(key, agg)));
    out += markdown_row(cells);
  }
  for (std::size_t i = 0; i < metric_sets.size(); ++i) {
    std::vector<std::string> cells = {i == 0 ? "mtme [noref]" : "", metric_sets[i].metric_name};
    for (const auto& key : columns) {
      const auto v = metric_sets[i].get(key.first, key.second);
      cells.push_back(v ? stats::format3(*v) : std::string(kAbsent));
    }
    out += markdown_row(cells);
  }
  return out;
}

}  // namespace pseudoref::report
