// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pseudoref/corpus.hpp"
#include "pseudoref/scores.hpp"

namespace pseudoref::stats {

class StatsError : public std::runtime_error {
 public:
  enum class Kind { ZeroBaseline, EmptyList, UnknownSegment, InvalidSample };

  StatsError(Kind kind, const std::string& detail);
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Predicted scores (xs) paired with human scores (ys). n >= 2, all finite.
class PairedSample {
 public:
  /// Throws StatsError(InvalidSample) when the invariants do not hold.
  PairedSample(std::vector<double> xs, std::vector<double> ys);

  std::span<const double> xs() const { return xs_; }
  std::span<const double> ys() const { return ys_; }
  std::size_t size() const { return xs_.size(); }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);

// The correlations return nullopt when either variable is constant.
std::optional<double> pearson(const PairedSample& s);
std::optional<double> spearman(const PairedSample& s);
/// Tau-b via Knight's O(n log n) merge-sort count, exact integer arithmetic.
std::optional<double> kendall_tau_b(const PairedSample& s);

struct CorrelationReport {
  corpus::LanguagePair lp;
  std::optional<double> rho;
  std::optional<double> r;
  std::optional<double> tau;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;

  bool degenerate() const { return !rho || !r || !tau; }
};

/// Joins scores to the segments of one language pair. Invalid or missing
/// scores are excluded pairwise; fewer than two usable points gives a
/// degenerate report. Throws StatsError(UnknownSegment) for ids not in `set`.
CorrelationReport correlate_pair(std::span<const scoring::QualityScore> scores, const corpus::EvaluationSet& set,
                                 const corpus::LanguagePair& lp);

/// One report per language pair of `set`, in dataset order.
std::vector<CorrelationReport> correlate_all(std::span<const scoring::QualityScore> scores,
                                             const corpus::EvaluationSet& set);

/// 100 * (ours - baseline) / baseline, rounded half away from zero.
long growth_percent(double ours, double baseline);
/// "+68%", "-10%", "+0%".
std::string format_growth(long percent);

enum class Aggregate { mean, median };

double aggregate(std::span<const double> values, Aggregate stat);

/// Half-away-from-zero rounding to `decimals` places; never returns -0.
double round_half_away(double x, int decimals = 3);
/// Rounds to 3 decimals and prints e.g. "0.560", "-0.001".
std::string format3(double x);

struct ComparisonCell {
  double ours = 0.0;
  bool exceeds_mean = false;
  bool exceeds_median = false;
  bool exceeds_best = false;
};

/// Strict comparisons on unrounded values.
ComparisonCell compare_to_metric_set(double ours, std::span<const double> metrics);

}  // namespace pseudoref::stats
