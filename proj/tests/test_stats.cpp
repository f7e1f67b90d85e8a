// Copyright 2026 The qdakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "support.hpp"

namespace qdakit {
namespace {

namespace oracle = testing::oracle;

using Vec = std::vector<double>;

TEST(Pearson, PerfectAndHandComputed) {
  EXPECT_DOUBLE_EQ(stats::pearson(Vec{1, 2, 3}, Vec{1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(stats::pearson(Vec{1, 2, 3}, Vec{3, 2, 1}), -1.0);
  // cov = 4, var = 5 each
  EXPECT_NEAR(stats::pearson(Vec{1, 2, 3, 4}, Vec{1, 3, 2, 4}), 0.8, 1e-15);
}

TEST(Pearson, ErrorsOnConstantOrShortInput) {
  try {
    stats::pearson(Vec{2, 2, 2}, Vec{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedVariance);
  }
  EXPECT_THROW(stats::pearson(Vec{1}, Vec{1}), Error);
  EXPECT_THROW(stats::pearson(Vec{1, 2}, Vec{1, 2, 3}), Error);
}

TEST(Pearson, AffineMapGivesSign) {
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x(8);
    for (double& v : x) v = u(rng);
    double a = u(rng);
    if (std::abs(a) < 0.1) a = 1.5;
    const double b = u(rng);
    Vec y;
    for (double v : x) y.push_back(a * v + b);
    ASSERT_NEAR(stats::pearson(x, y), a > 0 ? 1.0 : -1.0, 1e-12);
  }
}

TEST(Wilcoxon, SeparatedTriples) {
  auto r = stats::wilcoxon_rank_sum(Vec{1, 2, 3}, Vec{4, 5, 6});
  EXPECT_EQ(r.method, stats::Method::kExact);
  EXPECT_NEAR(r.p_value, 0.1, 1e-15);
  EXPECT_EQ(r.sidedness, "two_sided");
}

TEST(Wilcoxon, IdenticalSamples) {
  EXPECT_DOUBLE_EQ(stats::wilcoxon_rank_sum(Vec{1, 2}, Vec{1, 2}).p_value, 1.0);
  EXPECT_DOUBLE_EQ(stats::wilcoxon_rank_sum(Vec{0, 0, 0}, Vec{0, 0}).p_value, 1.0);
}

TEST(Wilcoxon, ExactAtTwentyMatchesEnumeration) {
  std::vector<int> a, b;
  for (int i = 1; i <= 10; ++i) a.push_back(i);
  for (int i = 11; i <= 20; ++i) b.push_back(i);
  b[0] = 5;  // one tie across samples
  Vec da(a.begin(), a.end()), db(b.begin(), b.end());
  auto r = stats::wilcoxon_rank_sum(da, db);
  auto o = oracle::wilcoxon(a, b);
  EXPECT_EQ(r.method, stats::Method::kExact);
  EXPECT_NEAR(r.p_value, o.p, 1e-12);
  EXPECT_NEAR(r.statistic, o.u, 1e-12);
}

TEST(Wilcoxon, LargeShiftUsesApproximation) {
  Vec a, b;
  for (int i = 0; i < 11; ++i) {
    a.push_back(i);
    b.push_back(100 + i);
  }
  auto r = stats::wilcoxon_rank_sum(a, b);
  EXPECT_EQ(r.method, stats::Method::kNormalApprox);
  EXPECT_LT(r.p_value, 0.001);
  // the same shape at n = 20 is exact and also tiny
  Vec a10(a.begin(), a.begin() + 10), b10(b.begin(), b.begin() + 10);
  auto e = stats::wilcoxon_rank_sum(a10, b10);
  EXPECT_EQ(e.method, stats::Method::kExact);
  EXPECT_NEAR(e.p_value, 2.0 / 184756.0, 1e-15);
  EXPECT_LT(e.p_value, 0.001);
}

TEST(Wilcoxon, ApproximationCloseToExactNearBoundary) {
  // n = 21 approximation vs exact enumeration of the same data
  std::mt19937 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> a, b;
    for (int i = 0; i < 10; ++i) a.push_back(static_cast<int>(rng() % 30));
    for (int i = 0; i < 11; ++i) b.push_back(static_cast<int>(rng() % 30) + 5);
    auto r = stats::wilcoxon_rank_sum(Vec(a.begin(), a.end()), Vec(b.begin(), b.end()));
    ASSERT_EQ(r.method, stats::Method::kNormalApprox);
    EXPECT_NEAR(r.p_value, oracle::wilcoxon(a, b).p, 0.03);
  }
}

TEST(Wilcoxon, SymmetricInSampleOrder) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    Vec a(1 + rng() % 8), b(1 + rng() % 8);
    for (double& v : a) v = static_cast<double>(rng() % 6);
    for (double& v : b) v = static_cast<double>(rng() % 6);
    ASSERT_NEAR(stats::wilcoxon_rank_sum(a, b).p_value,
                stats::wilcoxon_rank_sum(b, a).p_value, 1e-12);
  }
  EXPECT_THROW(stats::wilcoxon_rank_sum(Vec{}, Vec{1}), Error);
}

TEST(Fisher, IndependentAndDiagonal) {
  EXPECT_NEAR(stats::fishers_exact({5, 5, 5, 5}).p_value, 1.0, 1e-12);
  EXPECT_NEAR(stats::fishers_exact({2, 0, 0, 2}).p_value, 1.0 / 3.0, 1e-15);
}

TEST(Fisher, MatchesEnumerationOnFixture) {
  const unsigned t[4] = {8, 2, 1, 5};
  auto o = oracle::fisher(t[0], t[1], t[2], t[3]);
  EXPECT_NEAR(stats::fishers_exact({t[0], t[1], t[2], t[3]}).p_value, o.p, 1e-12);
  EXPECT_NEAR(o.p, 0.034965034965035, 1e-12);
}

TEST(Fisher, DegenerateMargins) {
  try {
    stats::fishers_exact({0, 0, 3, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateTable);
  }
  EXPECT_THROW(stats::fishers_exact({0, 3, 0, 4}), Error);
}

TEST(Fisher, PValuesInUnitIntervalAndSupportSumsToOne) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    unsigned a = rng() % 9, b = rng() % 9 + 1, c = rng() % 9 + 1, d = rng() % 9;
    const double p = stats::fishers_exact({a, b, c, d}).p_value;
    ASSERT_GT(p, 0.0);
    ASSERT_LE(p, 1.0);
    const unsigned r1 = a + b, c1 = a + c, r2 = c + d;
    double total = 0;
    for (unsigned x = c1 > r2 ? c1 - r2 : 0; x <= std::min(r1, c1); ++x) {
      total += oracle::fisher(x, r1 - x, c1 - x, r2 - (c1 - x)).p_observed;
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Percentile, NearestRank) {
  Vec v;
  for (int i = 1; i <= 100; ++i) v.push_back(i);
  EXPECT_EQ(stats::percentile(v, 99), 99);
  EXPECT_EQ(stats::percentile(v, 100), 100);
  EXPECT_EQ(stats::percentile(v, 0), 1);
  EXPECT_EQ(stats::percentile(Vec{7}, 37.5), 7);
  EXPECT_THROW(stats::percentile(Vec{}, 50), Error);
  EXPECT_THROW(stats::percentile(v, 101), Error);
}

TEST(Percentile, MonotoneInQ) {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    Vec v(1 + rng() % 30);
    for (double& x : v) x = static_cast<double>(rng() % 50);
    double prev = stats::percentile(v, 0);
    for (double q = 0.5; q <= 100.0; q += 0.5) {
      const double cur = stats::percentile(v, q);
      ASSERT_LE(prev, cur);
      prev = cur;
    }
  }
}

TEST(LeastSquares, ExactLine) {
  auto fit = stats::least_squares(Vec{1, 2, 3, 4}, Vec{3, 5, 7, 9});
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
  ASSERT_TRUE(fit.r_squared.has_value());
  EXPECT_NEAR(*fit.r_squared, 1.0, 1e-12);
}

TEST(LeastSquares, ConstantYHasNoRSquared) {
  auto fit = stats::least_squares(Vec{1, 2, 3}, Vec{4, 4, 4});
  EXPECT_FALSE(fit.r_squared.has_value());
  EXPECT_NEAR(fit.slope, 0.0, 1e-15);
}

TEST(LeastSquares, Errors) {
  EXPECT_THROW(stats::least_squares(Vec{1, 1, 1}, Vec{1, 2, 3}), Error);
  EXPECT_THROW(stats::least_squares(Vec{1, 2}, Vec{1, 2}), Error);
}

TEST(LeastSquares, MatchesClosedFormOnFixture) {
  std::vector<long long> x{1, 2, 3, 5, 8, 13}, y{2, 3, 7, 8, 15, 21};
  auto o = oracle::least_squares(x, y);
  auto fit = stats::least_squares(Vec(x.begin(), x.end()), Vec(y.begin(), y.end()));
  EXPECT_NEAR(fit.slope, o.slope, 1e-9);
  EXPECT_NEAR(fit.intercept, o.intercept, 1e-9);
  EXPECT_NEAR(*fit.r_squared, o.r_squared, 1e-9);
}

TEST(OracleSweep, AllRoutinesAgree) {
  auto s = testing::run_oracle_sweep(300, 99);
  EXPECT_EQ(s.instances, 1500u);
  EXPECT_LT(s.pearson, 1e-9);
  EXPECT_LT(s.wilcoxon_p, 1e-9);
  EXPECT_LT(s.wilcoxon_u, 1e-9);
  EXPECT_LT(s.fisher_p, 1e-9);
  EXPECT_LT(s.percentile, 1e-9);
  EXPECT_LT(s.slope, 1e-9);
  EXPECT_LT(s.intercept, 1e-9);
  EXPECT_LT(s.r_squared, 1e-9);
  EXPECT_GT(s.wilcoxon_exact, 0u);
}

}  // namespace
}  // namespace qdakit
