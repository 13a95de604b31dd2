// Copyright 2026 The pseudoref Authors
// SPDX-License-Identifier: Apache-2.0

#include "pseudoref/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles/brute_force.hpp"

namespace pseudoref::stats {
namespace {

PairedSample sample(std::vector<double> xs, std::vector<double> ys) { return {std::move(xs), std::move(ys)}; }

TEST(AverageRanks, Examples) {
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 30}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(average_ranks(std::vector<double>{5, 5}), (std::vector<double>{1.5, 1.5}));
  EXPECT_EQ(average_ranks(std::vector<double>{1, 2, 2, 3}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_EQ(average_ranks(std::vector<double>{3, 1, 2}), (std::vector<double>{3, 1, 2}));
}

TEST(Pearson, Examples) {
  EXPECT_DOUBLE_EQ(*pearson(sample({1, 2, 3}, {2, 4, 6})), 1.0);
  EXPECT_DOUBLE_EQ(*pearson(sample({1, 2, 3}, {6, 4, 2})), -1.0);
  EXPECT_DOUBLE_EQ(*pearson(sample({1, 2, 3, 4}, {1, 3, 2, 4})), 0.8);
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(*spearman(sample({1, 2, 3, 4}, {2, 10, 11, 400})), 1.0);
  EXPECT_DOUBLE_EQ(*spearman(sample({1, 2, 3}, {9, 5, 1})), -1.0);
  EXPECT_NEAR(*spearman(sample({1, 2, 2, 3}, {1, 2, 3, 4})), 4.5 / std::sqrt(22.5), 1e-12);
  EXPECT_NEAR(*spearman(sample({1, 2, 2, 3}, {1, 2, 3, 4})), 0.948683, 1e-6);
}

TEST(KendallTauB, Examples) {
  EXPECT_DOUBLE_EQ(*kendall_tau_b(sample({1, 2, 3}, {1, 2, 3})), 1.0);
  EXPECT_DOUBLE_EQ(*kendall_tau_b(sample({1, 2, 3}, {3, 2, 1})), -1.0);
  EXPECT_NEAR(*kendall_tau_b(sample({1, 2, 2, 3}, {1, 3, 2, 4})), 5.0 / std::sqrt(30.0), 1e-12);
  EXPECT_NEAR(*kendall_tau_b(sample({1, 2, 2, 3}, {1, 3, 2, 4})), 0.912871, 1e-6);
}

// Frozen from scipy.stats (tests/oracles/golden_values.py).
TEST(Correlations, MatchScipyGoldens) {
  const auto s = sample({17, 86, 60, 77, 47, 3, 70, 47, 88, 92}, {70, 29, 85, 61, 80, 34, 60, 31, 73, 66});
  EXPECT_NEAR(*kendall_tau_b(s), 0.044946657497549468, 1e-15);
  EXPECT_NEAR(*spearman(s), 0.024316221747202587, 1e-15);
  EXPECT_NEAR(*pearson(s), 0.16426413174421575, 1e-15);
  EXPECT_NEAR(*kendall_tau_b(sample({17, 86, 60, 77, 47, 3, 70, 87, 88, 92}, {70, 29, 85, 61, 80, 34, 60, 31, 73, 66})),
              -0.06666666666666667, 1e-15);
}

TEST(Correlations, DegenerateInputIsNotAnError) {
  const auto flat = sample({1, 1, 1}, {1, 2, 3});
  EXPECT_FALSE(pearson(flat));
  EXPECT_FALSE(spearman(flat));
  EXPECT_FALSE(kendall_tau_b(flat));
  const auto flat_y = sample({1, 2, 3}, {4, 4, 4});
  EXPECT_FALSE(pearson(flat_y));
  EXPECT_FALSE(kendall_tau_b(flat_y));
}

TEST(PairedSample, RejectsBadInput) {
  EXPECT_THROW(sample({1}, {1}), StatsError);
  EXPECT_THROW(sample({1, 2}, {1}), StatsError);
  EXPECT_THROW(sample({1, NAN}, {1, 2}), StatsError);
  EXPECT_THROW(sample({1, 2}, {1, INFINITY}), StatsError);
}

struct Draw {
  std::vector<double> xs, ys;
};

std::vector<Draw> seeded_draws(std::uint32_t seed, int count, int max_n, int max_value) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> n_dist(2, max_n);
  std::uniform_int_distribution<int> v_dist(0, max_value);
  std::vector<Draw> out;
  for (int k = 0; k < count; ++k) {
    Draw d;
    const int n = n_dist(rng);
    for (int i = 0; i < n; ++i) {
      d.xs.push_back(v_dist(rng));
      d.ys.push_back(v_dist(rng));
    }
    out.push_back(std::move(d));
  }
  return out;
}

void expect_same(const std::optional<double>& got, const std::optional<double>& want, double tol) {
  ASSERT_EQ(got.has_value(), want.has_value());
  if (got) EXPECT_NEAR(*got, *want, tol);
}

TEST(Correlations, MatchBruteForceOracleOnTiedSamples) {
  for (const auto& d : seeded_draws(20240917, 1000, 8, 3)) {
    const auto s = sample(d.xs, d.ys);
    expect_same(pearson(s), oracle::pearson(d.xs, d.ys), 1e-12);
    expect_same(spearman(s), oracle::spearman(d.xs, d.ys), 1e-12);
    expect_same(kendall_tau_b(s), oracle::kendall_tau_b(d.xs, d.ys), 1e-12);
  }
}

TEST(Correlations, MatchBruteForceOracleOnLargerSamples) {
  for (const auto& d : seeded_draws(7, 200, 300, 40)) {
    const auto s = sample(d.xs, d.ys);
    expect_same(pearson(s), oracle::pearson(d.xs, d.ys), 1e-12);
    expect_same(spearman(s), oracle::spearman(d.xs, d.ys), 1e-12);
    expect_same(kendall_tau_b(s), oracle::kendall_tau_b(d.xs, d.ys), 1e-12);
  }
}

TEST(Correlations, SpearmanIsPearsonOnAverageRanks) {
  for (const auto& d : seeded_draws(11, 500, 12, 5)) {
    const auto rx = average_ranks(d.xs);
    const auto ry = average_ranks(d.ys);
    expect_same(spearman(sample(d.xs, d.ys)), pearson(sample(rx, ry)), 1e-12);
  }
}

TEST(Correlations, InvariantUnderJointPermutation) {
  std::mt19937 rng(3);
  for (const auto& d : seeded_draws(5, 300, 10, 4)) {
    std::vector<std::size_t> idx(d.xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> px, py;
    for (auto i : idx) {
      px.push_back(d.xs[i]);
      py.push_back(d.ys[i]);
    }
    const auto a = sample(d.xs, d.ys);
    const auto b = sample(px, py);
    expect_same(pearson(b), pearson(a), 1e-12);
    expect_same(spearman(b), spearman(a), 1e-12);
    expect_same(kendall_tau_b(b), kendall_tau_b(a), 0.0);
  }
}

TEST(Correlations, AffineAndMonotoneInvariance) {
  for (const auto& d : seeded_draws(9, 300, 10, 6)) {
    std::vector<double> affine, monotone;
    for (double x : d.xs) {
      affine.push_back(3.5 * x - 2.0);
      monotone.push_back(std::exp(x) + x * x * x);
    }
    const auto base = sample(d.xs, d.ys);
    expect_same(pearson(sample(affine, d.ys)), pearson(base), 1e-9);
    expect_same(spearman(sample(monotone, d.ys)), spearman(base), 0.0);
    expect_same(kendall_tau_b(sample(monotone, d.ys)), kendall_tau_b(base), 0.0);
  }
}

TEST(Correlations, NegatingOneSideNegatesTheStatistic) {
  for (const auto& d : seeded_draws(13, 300, 8, 3)) {
    std::vector<double> neg;
    for (double y : d.ys) neg.push_back(-y);
    const auto a = sample(d.xs, d.ys);
    const auto b = sample(d.xs, neg);
    const auto check = [](std::optional<double> p, std::optional<double> q) {
      ASSERT_EQ(p.has_value(), q.has_value());
      if (p) EXPECT_NEAR(*p, -*q, 1e-12);
    };
    check(pearson(a), pearson(b));
    check(spearman(a), spearman(b));
    check(kendall_tau_b(a), kendall_tau_b(b));
  }
}

TEST(Correlations, BoundedByOne) {
  for (const auto& d : seeded_draws(17, 500, 8, 3)) {
    const auto s = sample(d.xs, d.ys);
    for (auto v : {pearson(s), spearman(s), kendall_tau_b(s)}) {
      if (v) {
        EXPECT_LE(*v, 1.0);
        EXPECT_GE(*v, -1.0);
      }
    }
  }
}

TEST(Growth, PublishedCells) {
  EXPECT_EQ(growth_percent(0.56, 0.333), 68);
  EXPECT_EQ(growth_percent(0.543, 0.379), 43);
  EXPECT_EQ(growth_percent(0.347, 0.384), -10);
  EXPECT_EQ(growth_percent(0.444, 0.089), 399);
  EXPECT_EQ(format_growth(68), "+68%");
  EXPECT_EQ(format_growth(-10), "-10%");
  EXPECT_EQ(format_growth(0), "+0%");
}

TEST(Growth, IdentityIsZero) {
  for (double x : {0.5, -0.25, 1e-6, 0.333}) EXPECT_EQ(growth_percent(x, x), 0);
}

TEST(Growth, ZeroBaselineThrows) {
  try {
    growth_percent(0.1, 0.0);
    FAIL();
  } catch (const StatsError& e) {
    EXPECT_EQ(e.kind(), StatsError::Kind::ZeroBaseline);
  }
}

TEST(Aggregate, UkrainianNorefRows) {
  const std::vector<double> rho{0.011, 0.005, 0.005, 0.000, -0.003};
  const std::vector<double> r{0.005, 0.005, 0.004, -0.008, -0.010};
  EXPECT_EQ(format3(aggregate(rho, Aggregate::median)), "0.005");
  EXPECT_EQ(format3(aggregate(rho, Aggregate::mean)), "0.004");
  EXPECT_NEAR(aggregate(rho, Aggregate::mean), 0.0036, 1e-15);
  EXPECT_EQ(format3(aggregate(r, Aggregate::median)), "0.004");
  EXPECT_EQ(format3(aggregate(r, Aggregate::mean)), "-0.001");
}

TEST(Aggregate, SingletonAndEvenCount) {
  const std::vector<double> one{0.42};
  EXPECT_EQ(aggregate(one, Aggregate::mean), 0.42);
  EXPECT_EQ(aggregate(one, Aggregate::median), 0.42);
  const std::vector<double> four{4, 1, 3, 2};
  EXPECT_EQ(aggregate(four, Aggregate::median), 2.5);
  EXPECT_THROW(aggregate(std::vector<double>{}, Aggregate::mean), StatsError);
}

TEST(Rounding, HalfAwayFromZero) {
  EXPECT_EQ(round_half_away(0.0005), 0.001);
  EXPECT_EQ(round_half_away(-0.0005), -0.001);
  EXPECT_EQ(round_half_away(0.0036), 0.004);
  EXPECT_EQ(format3(-0.0001), "0.000");
  EXPECT_EQ(format3(0.56), "0.560");
  EXPECT_EQ(format3(-0.0014), "-0.001");
}

TEST(Compare, UkrainianCells) {
  const std::vector<double> uk_rho{0.011, 0.005, 0.005, 0.000, -0.003};
  const auto c = compare_to_metric_set(0.025, uk_rho);
  EXPECT_TRUE(c.exceeds_mean);
  EXPECT_TRUE(c.exceeds_median);
  EXPECT_TRUE(c.exceeds_best);

  const auto at_max = compare_to_metric_set(0.011, uk_rho);
  EXPECT_FALSE(at_max.exceeds_best);

  const auto mid = compare_to_metric_set(0.010, uk_rho);
  EXPECT_TRUE(mid.exceeds_mean);
  EXPECT_FALSE(mid.exceeds_best);

  const auto at_mean = compare_to_metric_set(aggregate(uk_rho, Aggregate::mean), uk_rho);
  EXPECT_FALSE(at_mean.exceeds_mean);
}

}  // namespace
}  // namespace pseudoref::stats
