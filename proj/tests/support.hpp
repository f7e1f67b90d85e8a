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

// Test helpers: scratch directories, fixtures and brute-force oracles that
// share no code with the library routines they check.

#pragma once

#include <stdlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qdakit/qdakit.hpp"

namespace qdakit::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "qdakit-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

// A project initialised with the synthetic corpus.
inline Project synthetic_project(const std::filesystem::path& root,
                                 std::uint64_t seed = kDefaultSyntheticSeed) {
  Project p = Project::init(root);
  write_synthetic(root, seed);
  return p;
}

// Every artifact name -> manifest hash.
inline std::map<std::string, std::string> artifact_hashes(const Project& p) {
  std::map<std::string, std::string> out;
  for (const auto& [name, e] : p.manifest()) out[name] = e.sha256;
  return out;
}

namespace oracle {

// C(n, k) in 128-bit integers; exact for the small n used here.
inline unsigned __int128 choose(unsigned n, unsigned k) {
  if (k > n) return 0;
  unsigned __int128 r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Pearson r from integer sums: n*Sxy - Sx*Sy over the root of the product of
// the matching variance terms.
inline double pearson(const std::vector<long long>& x, const std::vector<long long>& y) {
  const long long n = static_cast<long long>(x.size());
  long long sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const long double num = static_cast<long double>(n * sxy - sx * sy);
  const long double vx = static_cast<long double>(n * sxx - sx * sx);
  const long double vy = static_cast<long double>(n * syy - sy * sy);
  return static_cast<double>(num / std::sqrt(vx * vy));
}

struct RankSum {
  double u = 0;
  double p = 1;
};

// Enumerates every way of choosing |a| of the pooled observations as the
// first sample and counts rank-sum deviations at least as large as observed.
// Ranks are midranks computed by counting.
inline RankSum wilcoxon(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t na = a.size();
  // doubled midrank = 2 * (#less) + (#equal) + 1
  std::vector<long long> r2(n);
  for (std::size_t i = 0; i < n; ++i) {
    long long less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      less += pooled[j] < pooled[i];
      equal += pooled[j] == pooled[i];
    }
    r2[i] = 2 * less + equal + 1;
  }
  long long obs = 0;
  for (std::size_t i = 0; i < na; ++i) obs += r2[i];
  const long long expected = static_cast<long long>(na) * static_cast<long long>(n + 1);
  const long long dev = std::llabs(obs - expected);
  std::uint64_t total = 0, extreme = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
    long long s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += r2[i];
    }
    ++total;
    if (std::llabs(s - expected) >= dev) ++extreme;
  }
  RankSum out;
  out.u = static_cast<double>(obs) / 2.0 - static_cast<double>(na * (na + 1)) / 2.0;
  out.p = static_cast<double>(extreme) / static_cast<double>(total);
  return out;
}

struct Fisher {
  double p_observed = 0;
  double p = 1;
};

// Hypergeometric probabilities as exact integer ratios C(r1,x)C(r2,c1-x) /
// C(n,c1). Tables count as "no more likely" with the customary relative
// slack of 1e-7.
inline Fisher fisher(unsigned a, unsigned b, unsigned c, unsigned d) {
  const unsigned r1 = a + b, r2 = c + d, c1 = a + c, n = a + b + c + d;
  const unsigned lo = c1 > r2 ? c1 - r2 : 0;
  const unsigned hi = std::min(r1, c1);
  const unsigned __int128 denom = choose(n, c1);
  const unsigned __int128 obs = choose(r1, a) * choose(r2, c1 - a);
  unsigned __int128 acc = 0;
  for (unsigned x = lo; x <= hi; ++x) {
    const unsigned __int128 w = choose(r1, x) * choose(r2, c1 - x);
    if (static_cast<long double>(w) <= static_cast<long double>(obs) * (1.0L + 1e-7L)) acc += w;
  }
  Fisher f;
  f.p_observed = static_cast<double>(static_cast<long double>(obs) / static_cast<long double>(denom));
  f.p = static_cast<double>(static_cast<long double>(acc) / static_cast<long double>(denom));
  return f;
}

// Nearest-rank percentile by definition: the smallest sample value v with at
// least q percent of the sample <= v; the minimum for q = 0.
inline long long percentile(const std::vector<long long>& v, double q) {
  long long best = 0;
  bool found = false;
  for (long long cand : v) {
    std::size_t at_most = 0;
    for (long long w : v) at_most += w <= cand;
    // at_most / n >= q / 100, compared without division
    const bool ok = q == 0.0 || static_cast<double>(at_most) * 100.0 >=
                                    q * static_cast<double>(v.size()) - 1e-9;
    if (ok && (!found || cand < best)) {
      best = cand;
      found = true;
    }
  }
  return best;
}

struct Line {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

// Closed-form simple regression from exact integer sums; r^2 is the squared
// correlation.
inline Line least_squares(const std::vector<long long>& x, const std::vector<long long>& y) {
  const long long n = static_cast<long long>(x.size());
  long long sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  Line l;
  const long double den = static_cast<long double>(n * sxx - sx * sx);
  l.slope = static_cast<double>(static_cast<long double>(n * sxy - sx * sy) / den);
  l.intercept = static_cast<double>((static_cast<long double>(sy) * sxx -
                                     static_cast<long double>(sx) * sxy) /
                                    den);
  const double r = pearson(x, y);
  l.r_squared = r * r;
  return l;
}

}  // namespace oracle

// Randomised stats instances checked against the oracles. Returns the number
// of instances and the worst absolute error seen per routine.
struct OracleSweep {
  std::size_t instances = 0;
  double pearson = 0;
  double wilcoxon_p = 0;
  double wilcoxon_u = 0;
  double fisher_p = 0;
  double percentile = 0;
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  std::size_t wilcoxon_exact = 0;
};

inline OracleSweep run_oracle_sweep(std::size_t per_routine, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  OracleSweep s;
  auto worse = [](double& slot, double err) { slot = std::max(slot, err); };

  for (std::size_t i = 0; i < per_routine; ++i) {
    const std::size_t n = static_cast<std::size_t>(uniform(2, 12));
    std::vector<long long> x(n), y(n);
    do {
      for (auto& v : x) v = uniform(-20, 20);
    } while (std::all_of(x.begin(), x.end(), [&](long long v) { return v == x[0]; }));
    do {
      for (auto& v : y) v = uniform(-20, 20);
    } while (std::all_of(y.begin(), y.end(), [&](long long v) { return v == y[0]; }));
    std::vector<double> xd(x.begin(), x.end()), yd(y.begin(), y.end());
    worse(s.pearson, std::abs(stats::pearson(xd, yd) - oracle::pearson(x, y)));
    ++s.instances;
  }

  for (std::size_t i = 0; i < per_routine; ++i) {
    const std::size_t na = static_cast<std::size_t>(uniform(1, 8));
    const std::size_t nb = static_cast<std::size_t>(uniform(1, 8));
    const long long spread = uniform(1, 10);  // small spreads force ties
    std::vector<int> a(na), b(nb);
    for (auto& v : a) v = static_cast<int>(uniform(0, spread));
    for (auto& v : b) v = static_cast<int>(uniform(0, spread));
    std::vector<double> ad(a.begin(), a.end()), bd(b.begin(), b.end());
    auto got = stats::wilcoxon_rank_sum(ad, bd);
    auto want = oracle::wilcoxon(a, b);
    worse(s.wilcoxon_p, std::abs(got.p_value - want.p));
    worse(s.wilcoxon_u, std::abs(got.statistic - want.u));
    s.wilcoxon_exact += got.method == stats::Method::kExact;
    ++s.instances;
  }

  for (std::size_t i = 0; i < per_routine; ++i) {
    unsigned a, b, c, d;
    do {
      a = static_cast<unsigned>(uniform(0, 15));
      b = static_cast<unsigned>(uniform(0, 15));
      c = static_cast<unsigned>(uniform(0, 15));
      d = static_cast<unsigned>(uniform(0, 15));
    } while (a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0);
    auto got = stats::fishers_exact({a, b, c, d});
    worse(s.fisher_p, std::abs(got.p_value - oracle::fisher(a, b, c, d).p));
    ++s.instances;
  }

  for (std::size_t i = 0; i < per_routine; ++i) {
    const std::size_t n = static_cast<std::size_t>(uniform(1, 40));
    std::vector<long long> v(n);
    for (auto& e : v) e = uniform(-50, 50);
    const double q = static_cast<double>(uniform(0, 100));
    std::vector<double> vd(v.begin(), v.end());
    worse(s.percentile,
          std::abs(stats::percentile(vd, q) - static_cast<double>(oracle::percentile(v, q))));
    ++s.instances;
  }

  for (std::size_t i = 0; i < per_routine; ++i) {
    const std::size_t n = static_cast<std::size_t>(uniform(3, 15));
    std::vector<long long> x(n), y(n);
    do {
      for (auto& v : x) v = uniform(-30, 30);
    } while (std::all_of(x.begin(), x.end(), [&](long long v) { return v == x[0]; }));
    do {
      for (auto& v : y) v = uniform(-30, 30);
    } while (std::all_of(y.begin(), y.end(), [&](long long v) { return v == y[0]; }));
    std::vector<double> xd(x.begin(), x.end()), yd(y.begin(), y.end());
    auto got = stats::least_squares(xd, yd);
    auto want = oracle::least_squares(x, y);
    worse(s.slope, std::abs(got.slope - want.slope));
    worse(s.intercept, std::abs(got.intercept - want.intercept));
    worse(s.r_squared, std::abs(got.r_squared.value_or(-1) - want.r_squared));
    ++s.instances;
  }
  return s;
}

// Unit-weight graph from an edge list.
inline UnigramGraph graph_of(const std::vector<std::pair<std::string, std::string>>& edges,
                             std::uint64_t weight = 1) {
  UnigramGraph g;
  for (const auto& [a, b] : edges) {
    if (!g.find(a)) g.add_vertex(a);
    if (!g.find(b)) g.add_vertex(b);
    g.set_edge(a, b, weight);
  }
  return g;
}

inline UnigramGraph two_triangles() {
  return graph_of({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "d"}, {"d", "e"}, {"e", "f"}, {"d", "f"}});
}

inline UnigramGraph four_path() { return graph_of({{"a", "b"}, {"b", "c"}, {"c", "d"}}); }

// Two 5-cliques joined by a single bridge edge.
inline UnigramGraph two_cliques() {
  std::vector<std::pair<std::string, std::string>> edges;
  for (const std::string side : {"p", "q"}) {
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) {
        edges.push_back({side + std::to_string(i), side + std::to_string(j)});
      }
    }
  }
  edges.push_back({"p4", "q0"});
  return graph_of(edges);
}

// G(n, p) with vertices v00.. and unit weights; isolated vertices are kept.
inline UnigramGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  UnigramGraph g;
  auto name = [](std::size_t i) { return std::string("v") + (i < 10 ? "0" : "") + std::to_string(i); };
  for (std::size_t i = 0; i < n; ++i) g.add_vertex(name(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) < p) g.set_edge(i, j, 1);
    }
  }
  return g;
}

// A TDM whose rows u001..u100 have totals 1..100 over two documents.
inline TermDocumentMatrix totals_fixture() {
  std::vector<std::string> unigrams;
  std::vector<std::uint32_t> counts;
  for (int t = 1; t <= 100; ++t) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "u%03d", t);
    unigrams.emplace_back(buf);
    counts.push_back(static_cast<std::uint32_t>((t + 1) / 2));
    counts.push_back(static_cast<std::uint32_t>(t / 2));
  }
  return TermDocumentMatrix(SetLabel::kTraining, unigrams, {"d1", "d2"}, counts);
}

}  // namespace qdakit::testing
