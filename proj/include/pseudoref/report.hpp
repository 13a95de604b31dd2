// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pseudoref/corpus.hpp"
#include "pseudoref/stats.hpp"

namespace pseudoref::report {

enum class Format { markdown, csv };

class ReportError : public std::runtime_error {
 public:
  enum class Kind { InconsistentColumns, MissingMetricValues, NotReferenceFree };

  ReportError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Correlations of one model on one language pair, ours vs. the
/// direct-scoring baseline.
struct PairCells {
  std::optional<double> rho_ours;
  std::optional<double> r_ours;
  std::optional<double> rho_base;
  std::optional<double> r_base;

  /// Present iff ours and a non-zero baseline are both present.
  std::optional<long> rho_growth() const;
  std::optional<long> r_growth() const;
};

struct Experiment1Row {
  std::string model_label;
  std::map<corpus::LanguagePair, PairCells> pairs;
};

/// Table of ours / baseline / growth rows per model. Pairs missing from a row
/// render as absent cells; a row holding a pair outside `pairs` is an error.
std::string render_experiment1(std::span<const Experiment1Row> rows, std::span<const corpus::LanguagePair> pairs,
                               Format format);

using CellKey = std::pair<corpus::LanguagePair, corpus::Statistic>;

struct Experiment2Row {
  std::string system_label;
  std::map<CellKey, double> values;
};

/// Flags of one of our cells against the reference-free metric values for the
/// same pair and statistic.
stats::ComparisonCell compare_cell(double ours, std::span<const corpus::MetricScoreSet> metric_sets,
                                   const corpus::LanguagePair& lp, corpus::Statistic stat);

/// Our rows, then the median and mean of the metric sets, then each metric
/// set. Our cells above the metric mean are bold in markdown; CSV carries all
/// three comparison flags.
std::string render_experiment2(std::span<const Experiment2Row> ours_rows,
                               std::span<const corpus::MetricScoreSet> metric_sets,
                               std::span<const corpus::LanguagePair> pairs,
                               std::span<const corpus::Statistic> statistics, Format format);

}  // namespace pseudoref::report
