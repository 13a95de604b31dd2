// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>

#include <fmt/format.h>

namespace pseudoref::stats {
namespace {

using Kind = StatsError::Kind;

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double pearson_raw(std::span<const double> xs, std::span<const double> ys) {
  const auto n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Sum of t(t-1)/2 over runs of equal keys in an already sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    auto run_end = std::find_if_not(first, last, [&](const auto& v) { return eq(v, *first); });
    const auto t = static_cast<std::int64_t>(std::distance(first, run_end));
    total += t * (t - 1) / 2;
    first = run_end;
  }
  return total;
}

// Stable merge sort of `v` that returns the number of inversions (pairs i<j
// with v[i] > v[j]).
std::int64_t sort_count_inversions(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                                   std::size_t hi) {
  if (hi - lo < 2) return 0;
  const auto mid = lo + (hi - lo) / 2;
  auto swaps = sort_count_inversions(v, buf, lo, mid) + sort_count_inversions(v, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

StatsError::StatsError(Kind kind, const std::string& detail) : std::runtime_error(detail), kind_(kind) {}

PairedSample::PairedSample(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() != ys_.size()) throw StatsError(Kind::InvalidSample, "xs and ys differ in length");
  if (xs_.size() < 2) throw StatsError(Kind::InvalidSample, "a paired sample needs at least 2 points");
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(xs_.begin(), xs_.end(), finite) || !std::all_of(ys_.begin(), ys_.end(), finite)) {
    throw StatsError(Kind::InvalidSample, "paired sample contains non-finite values");
  }
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    auto j = i;
    while (j < order.size() && xs[order[j]] == xs[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (auto k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> pearson(const PairedSample& s) {
  if (is_constant(s.xs()) || is_constant(s.ys())) return std::nullopt;
  return pearson_raw(s.xs(), s.ys());
}

std::optional<double> spearman(const PairedSample& s) {
  if (is_constant(s.xs()) || is_constant(s.ys())) return std::nullopt;
  const auto rx = average_ranks(s.xs());
  const auto ry = average_ranks(s.ys());
  return pearson_raw(rx, ry);
}

std::optional<double> kendall_tau_b(const PairedSample& s) {
  if (is_constant(s.xs()) || is_constant(s.ys())) return std::nullopt;
  const auto n = s.size();
  std::vector<std::pair<double, double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {s.xs()[i], s.ys()[i]};
  std::sort(pts.begin(), pts.end());

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const auto x_ties = tied_pairs(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const auto joint_ties = tied_pairs(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a == b; });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pts[i].second;
  std::vector<double> buf(n);
  // Pairs tied in x are sorted by y, so they never count as inversions.
  const auto discordant = sort_count_inversions(ys, buf, 0, n);
  const auto y_ties = tied_pairs(ys.begin(), ys.end(), std::equal_to<>());

  // concordant - discordant = total - x_ties - y_ties + joint_ties - 2 * discordant
  const auto numerator = total - x_ties - y_ties + joint_ties - 2 * discordant;
  const auto denom = std::sqrt(static_cast<double>(total - x_ties)) * std::sqrt(static_cast<double>(total - y_ties));
  return std::clamp(static_cast<double>(numerator) / denom, -1.0, 1.0);
}

CorrelationReport correlate_pair(std::span<const scoring::QualityScore> scores, const corpus::EvaluationSet& set,
                                 const corpus::LanguagePair& lp) {
  std::map<std::string_view, const scoring::QualityScore*> by_id;
  for (const auto& s : scores) {
    if (!set.find(s.segment_id)) throw StatsError(Kind::UnknownSegment, "score for unknown segment '" + s.segment_id + "'");
    by_id[s.segment_id] = &s;
  }

  CorrelationReport report;
  report.lp = lp;
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto idx : set.indices_for(lp)) {
    const auto& seg = set.segments()[idx];
    auto it = by_id.find(seg.id);
    if (it == by_id.end() || !it->second->valid || !it->second->value) {
      ++report.n_excluded;
      continue;
    }
    xs.push_back(*it->second->value);
    ys.push_back(seg.human_score);
  }
  report.n_used = xs.size();
  if (xs.size() < 2) return report;
  const PairedSample sample(std::move(xs), std::move(ys));
  report.rho = spearman(sample);
  report.r = pearson(sample);
  report.tau = kendall_tau_b(sample);
  return report;
}

std::vector<CorrelationReport> correlate_all(std::span<const scoring::QualityScore> scores,
                                             const corpus::EvaluationSet& set) {
  std::vector<CorrelationReport> out;
  for (const auto& lp : set.language_pairs()) out.push_back(correlate_pair(scores, set, lp));
  return out;
}

long growth_percent(double ours, double baseline) {
  if (baseline == 0.0) throw StatsError(Kind::ZeroBaseline, "growth against a zero baseline is undefined");
  return std::lround(100.0 * (ours - baseline) / baseline);
}

std::string format_growth(long percent) { return fmt::format("{:+d}%", percent); }

double aggregate(std::span<const double> values, Aggregate stat) {
  if (values.empty()) throw StatsError(Kind::EmptyList, "cannot aggregate an empty list");
  if (stat == Aggregate::mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  return median_of(std::vector<double>(values.begin(), values.end()));
}

double round_half_away(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(x * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

std::string format3(double x) { return fmt::format("{:.3f}", round_half_away(x, 3)); }

ComparisonCell compare_to_metric_set(double ours, std::span<const double> metrics) {
  if (metrics.empty()) throw StatsError(Kind::EmptyList, "no metric values to compare against");
  ComparisonCell cell;
  cell.ours = ours;
  cell.exceeds_mean = ours > aggregate(metrics, Aggregate::mean);
  cell.exceeds_median = ours > aggregate(metrics, Aggregate::median);
  cell.exceeds_best = ours > *std::max_element(metrics.begin(), metrics.end());
  return cell;
}

}  // namespace pseudoref::stats
