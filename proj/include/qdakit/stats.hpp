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

// Small exact statistics: Pearson correlation, Wilcoxon rank-sum, Fisher's
// exact test, nearest-rank percentiles and simple linear least squares.
// Everything here is pure and reentrant.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdakit/error.hpp"

namespace qdakit::stats {

enum class Method { kExact, kNormalApprox };

inline std::string to_string(Method m) {
  return m == Method::kExact ? "exact" : "normal_approx";
}

struct TestResult {
  double statistic = 0;
  double p_value = 1;
  Method method = Method::kExact;
  // Only two-sided tests are provided.
  std::string sidedness = "two_sided";
};

namespace detail {

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

}  // namespace detail

// Sample Pearson correlation, clamped to [-1, 1].
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kValidation,
                "pearson: vectors must have equal length >= 2");
  }
  if (detail::is_constant(x) || detail::is_constant(y)) {
    throw Error(ErrorCode::kUndefinedVariance,
                "pearson: constant input has zero variance");
  }
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Largest combined sample size evaluated by exact enumeration.
inline constexpr std::size_t kWilcoxonExactLimit = 20;

// Two-sided Wilcoxon rank-sum (Mann-Whitney) test of `a` against `b`, with
// midranks for ties. The statistic is U = R_a - n_a(n_a+1)/2, the form R's
// wilcox.test reports as W. Exact when n_a + n_b <= 20: the null
// distribution of the rank sum is counted over all C(n, n_a) assignments of
// the observed midranks. Otherwise a normal approximation with tie-corrected
// variance and continuity correction.
inline TestResult wilcoxon_rank_sum(std::span<const double> a,
                                    std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::kValidation, "wilcoxon: both samples must be non-empty");
  }
  const std::size_t na = a.size();
  const std::size_t n = na + b.size();
  std::vector<std::pair<double, bool>> pooled;
  pooled.reserve(n);
  for (double v : a) pooled.emplace_back(v, true);
  for (double v : b) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  // Doubled midranks keep every rank an integer.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    for (std::size_t k = i; k < j; ++k) {
      rank2[k] = static_cast<std::int64_t>(i + j + 1);
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  std::int64_t observed2 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (pooled[k].second) observed2 += rank2[k];
  }
  const double rank_sum = static_cast<double>(observed2) / 2.0;
  TestResult result;
  result.statistic =
      rank_sum - static_cast<double>(na) * static_cast<double>(na + 1) / 2.0;

  const std::int64_t expected2 =
      static_cast<std::int64_t>(na) * static_cast<std::int64_t>(n + 1);
  const std::int64_t observed_dev = std::llabs(observed2 - expected2);

  if (n <= kWilcoxonExactLimit) {
    const std::int64_t max_sum = static_cast<std::int64_t>(n) *
                                 static_cast<std::int64_t>(n + 1);
    // ways[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<std::uint64_t>> ways(
        na + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(max_sum) + 1, 0));
    ways[0][0] = 1;
    for (std::size_t item = 0; item < n; ++item) {
      const auto r = static_cast<std::size_t>(rank2[item]);
      for (std::size_t k = std::min(na, item + 1); k >= 1; --k) {
        for (std::size_t s = static_cast<std::size_t>(max_sum); s >= r; --s) {
          ways[k][s] += ways[k - 1][s - r];
        }
      }
    }
    std::uint64_t total = 0;
    std::uint64_t extreme = 0;
    for (std::size_t s = 0; s < ways[na].size(); ++s) {
      total += ways[na][s];
      if (std::llabs(static_cast<std::int64_t>(s) - expected2) >= observed_dev) {
        extreme += ways[na][s];
      }
    }
    result.method = Method::kExact;
    result.p_value = std::min(
        1.0, static_cast<double>(extreme) / static_cast<double>(total));
    return result;
  }

  const double dna = static_cast<double>(na);
  const double dnb = static_cast<double>(b.size());
  const double dn = static_cast<double>(n);
  const double variance =
      dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  result.method = Method::kNormalApprox;
  if (variance <= 0) {
    result.p_value = 1.0;
    return result;
  }
  const double deviation = std::abs(result.statistic - dna * dnb / 2.0);
  const double z = std::max(0.0, deviation - 0.5) / std::sqrt(variance);
  result.p_value = std::min(1.0, 2.0 * normal_sf(z));
  return result;
}

// 2x2 contingency table [[a, b], [c, d]].
struct Table2x2 {
  std::uint64_t a = 0, b = 0, c = 0, d = 0;
};

// Relative slack when comparing table probabilities with the observed one.
inline constexpr double kFisherSlack = 1e-7;

// Two-sided Fisher exact test: sums the hypergeometric probabilities of all
// tables with the observed margins that are no more likely than the observed
// table. The statistic is the observed table's probability.
inline TestResult fishers_exact(const Table2x2& t) {
  const std::uint64_t row1 = t.a + t.b;
  const std::uint64_t row2 = t.c + t.d;
  const std::uint64_t col1 = t.a + t.c;
  const std::uint64_t col2 = t.b + t.d;
  if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) {
    throw Error(ErrorCode::kDegenerateTable,
                "fisher: every row and column margin must be positive");
  }
  const std::uint64_t lo = col1 > row2 ? col1 - row2 : 0;
  const std::uint64_t hi = std::min(row1, col1);

  // Unnormalised pmf over the support via the ratio recurrence
  // P(x+1)/P(x) = (row1-x)(col1-x) / ((x+1)(row2-col1+x+1)), started at
  // the mode so no term overflows.
  const std::size_t size = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> w(size, 0.0);
  const double mode_real = static_cast<double>(row1 + 1) *
                           static_cast<double>(col1 + 1) /
                           static_cast<double>(row1 + row2 + 2);
  auto mode = static_cast<std::uint64_t>(std::floor(mode_real));
  mode = std::clamp(mode, lo, hi);
  w[mode - lo] = 1.0;
  for (std::uint64_t x = mode; x < hi; ++x) {
    const double ratio = static_cast<double>(row1 - x) * static_cast<double>(col1 - x) /
                         (static_cast<double>(x + 1) *
                          static_cast<double>(row2 - col1 + x + 1));
    w[x + 1 - lo] = w[x - lo] * ratio;
  }
  for (std::uint64_t x = mode; x > lo; --x) {
    const double ratio = static_cast<double>(x) *
                         static_cast<double>(row2 - col1 + x) /
                         (static_cast<double>(row1 - x + 1) *
                          static_cast<double>(col1 - x + 1));
    w[x - 1 - lo] = w[x - lo] * ratio;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double observed = w[t.a - lo];
  double p = 0;
  for (double v : w) {
    if (v <= observed * (1.0 + kFisherSlack)) p += v;
  }
  TestResult result;
  result.statistic = observed / total;
  result.p_value = std::min(1.0, p / total);
  result.method = Method::kExact;
  return result;
}

// 1-based order-statistic rank of the nearest-rank q-th percentile:
// ceil(q/100 * n), at least 1.
inline std::size_t nearest_rank(double q, std::size_t n) {
  if (!(q >= 0.0 && q <= 100.0)) {
    throw Error(ErrorCode::kConfiguration, "percentile must lie in [0, 100]");
  }
  // q*n/100 first: 99*100/100 is exact where 0.99*100 is not.
  const double pos = q * static_cast<double>(n) / 100.0;
  auto rank = static_cast<std::size_t>(std::ceil(pos - 1e-9));
  return std::clamp<std::size_t>(rank, 1, n);
}

// Nearest-rank percentile.
inline double percentile(std::span<const double> values, double q) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyInput, "percentile of an empty sample");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[nearest_rank(q, sorted.size()) - 1];
}

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  // Unset when y is constant (total sum of squares is zero).
  std::optional<double> r_squared;
};

// Ordinary least squares y = slope * x + intercept.
inline LinearFit least_squares(std::span<const double> x,
                               std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw Error(ErrorCode::kValidation,
                "least squares: vectors must have equal length >= 3");
  }
  if (detail::is_constant(x)) {
    throw Error(ErrorCode::kUndefinedVariance, "least squares: constant x");
  }
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0) {
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - (fit.slope * x[i] + fit.intercept);
      ss_res += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace qdakit::stats
