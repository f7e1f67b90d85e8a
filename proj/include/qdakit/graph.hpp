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

// Weighted unigram co-occurrence graphs and their analysis.
//
// Girvan-Newman runs on weighted shortest paths where an edge of weight w
// has length 1/w. The edge with the highest betweenness is removed until no
// edges remain; every change in the component count is a candidate split,
// and the split of highest modularity whose non-singleton components all
// reach the minimum size becomes the partition.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qdakit/error.hpp"
#include "qdakit/matrix.hpp"
#include "qdakit/stats.hpp"

namespace qdakit {

enum class VertexRole { kCategory, kTransitionalCode, kPlain };

inline std::string to_string(VertexRole r) {
  switch (r) {
    case VertexRole::kCategory: return "category";
    case VertexRole::kTransitionalCode: return "transitional_code";
    case VertexRole::kPlain: return "plain";
  }
  return "plain";
}

inline VertexRole parse_vertex_role(std::string_view s) {
  if (s == "category") return VertexRole::kCategory;
  if (s == "transitional_code") return VertexRole::kTransitionalCode;
  if (s == "plain") return VertexRole::kPlain;
  throw Error(ErrorCode::kValidation, "unknown vertex role '" + std::string(s) + "'");
}

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::uint64_t weight = 0;
};

class UnigramGraph {
 public:
  std::size_t add_vertex(std::string label, VertexRole role = VertexRole::kPlain) {
    if (index_.count(label) != 0) {
      throw Error(ErrorCode::kValidation, "duplicate vertex '" + label + "'");
    }
    const std::size_t id = labels_.size();
    index_.emplace(label, id);
    labels_.push_back(std::move(label));
    roles_.push_back(role);
    adj_.emplace_back();
    return id;
  }

  // Sets the weight of an undirected edge; weight 0 removes it.
  void set_edge(std::size_t u, std::size_t v, std::uint64_t weight) {
    if (u >= size() || v >= size()) {
      throw Error(ErrorCode::kValidation, "edge endpoint out of range");
    }
    if (u == v) throw Error(ErrorCode::kValidation, "self-loop on '" + labels_[u] + "'");
    if (weight == 0) {
      adj_[u].erase(v);
      adj_[v].erase(u);
      return;
    }
    adj_[u][v] = weight;
    adj_[v][u] = weight;
  }

  void set_edge(std::string_view a, std::string_view b, std::uint64_t weight) {
    set_edge(require(a), require(b), weight);
  }

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t v) const { return labels_[v]; }
  VertexRole role(std::size_t v) const { return roles_[v]; }
  void set_role(std::size_t v, VertexRole r) { roles_[v] = r; }

  std::optional<std::size_t> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(std::string_view label) const {
    auto v = find(label);
    if (!v) throw Error(ErrorCode::kLookup, "vertex '" + std::string(label) + "' not in graph");
    return *v;
  }

  std::uint64_t weight(std::size_t u, std::size_t v) const {
    auto it = adj_[u].find(v);
    return it == adj_[u].end() ? 0 : it->second;
  }

  const std::map<std::size_t, std::uint64_t>& neighbors(std::size_t v) const { return adj_[v]; }
  std::size_t degree(std::size_t v) const { return adj_[v].size(); }

  std::uint64_t strength(std::size_t v) const {
    std::uint64_t s = 0;
    for (const auto& [n, w] : adj_[v]) s += w;
    return s;
  }

  // Each undirected edge once, u < v by index.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t u = 0; u < size(); ++u) {
      for (const auto& [v, w] : adj_[u]) {
        if (u < v) out.push_back({u, v, w});
      }
    }
    return out;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& a : adj_) n += a.size();
    return n / 2;
  }

  std::uint64_t total_weight() const {
    std::uint64_t t = 0;
    for (std::size_t v = 0; v < size(); ++v) t += strength(v);
    return t / 2;
  }

  // Equal as labelled graphs: same labels, roles and weighted edges,
  // independent of insertion order.
  friend bool operator==(const UnigramGraph& a, const UnigramGraph& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t v = 0; v < a.size(); ++v) {
      auto w = b.find(a.label(v));
      if (!w || b.role(*w) != a.role(v) || b.degree(*w) != a.degree(v)) return false;
      for (const auto& [n, weight] : a.neighbors(v)) {
        auto m = b.find(a.label(n));
        if (!m || b.weight(*w, *m) != weight) return false;
      }
    }
    return true;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<VertexRole> roles_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::map<std::size_t, std::uint64_t>> adj_;
};

// One vertex per matrix row; edge weight is the number of units where both
// unigrams are present.
inline UnigramGraph cooccurrence_graph(const BinaryMatrix& binary,
                                       const std::map<std::string, VertexRole>& roles = {}) {
  if (binary.rows() == 0) {
    throw Error(ErrorCode::kEmptyInput, "co-occurrence graph of an empty matrix");
  }
  UnigramGraph g;
  for (const auto& u : binary.unigrams()) {
    auto it = roles.find(u);
    g.add_vertex(u, it == roles.end() ? VertexRole::kPlain : it->second);
  }
  std::vector<std::vector<std::size_t>> present(binary.rows());
  for (std::size_t r = 0; r < binary.rows(); ++r) {
    for (std::size_t c = 0; c < binary.cols(); ++c) {
      if (binary.at(r, c)) present[r].push_back(c);
    }
  }
  for (std::size_t a = 0; a < binary.rows(); ++a) {
    for (std::size_t b = a + 1; b < binary.rows(); ++b) {
      std::vector<std::size_t> both;
      std::set_intersection(present[a].begin(), present[a].end(), present[b].begin(),
                            present[b].end(), std::back_inserter(both));
      if (!both.empty()) g.set_edge(a, b, both.size());
    }
  }
  return g;
}

// Relative tolerance for equal path lengths and tied betweenness scores.
inline constexpr double kPathTolerance = 1e-9;

namespace detail {

using Adjacency = std::vector<std::map<std::size_t, std::uint64_t>>;
using EdgeKey = std::pair<std::size_t, std::size_t>;

inline EdgeKey edge_key(std::size_t a, std::size_t b) { return {std::min(a, b), std::max(a, b)}; }

inline bool same_length(double a, double b) {
  return std::abs(a - b) <= kPathTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

// Brandes accumulation from each source in `sources`, weighted Dijkstra with
// length 1/w. Adds ordered-pair dependencies into `bc`.
inline void accumulate_betweenness(const Adjacency& adj, const std::vector<std::size_t>& sources,
                                   std::map<EdgeKey, double>& bc) {
  const std::size_t n = adj.size();
  std::vector<double> dist(n), sigma(n), delta(n);
  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<char> done(n);
  for (std::size_t s : sources) {
    std::fill(dist.begin(), dist.end(), -1.0);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(done.begin(), done.end(), 0);
    for (auto& p : preds) p.clear();
    std::vector<std::size_t> order;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0;
    sigma[s] = 1;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (done[v]) continue;
      done[v] = 1;
      order.push_back(v);
      for (const auto& [w, weight] : adj[v]) {
        if (done[w]) continue;
        const double nd = dist[v] + 1.0 / static_cast<double>(weight);
        if (dist[w] < 0 || (nd < dist[w] && !same_length(nd, dist[w]))) {
          dist[w] = nd;
          sigma[w] = sigma[v];
          preds[w].assign(1, v);
          pq.emplace(nd, w);
        } else if (same_length(nd, dist[w])) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (std::size_t v : preds[w]) {
        const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        bc[edge_key(v, w)] += c;
        delta[v] += c;
      }
    }
  }
}

inline std::vector<std::vector<std::size_t>> components(const Adjacency& adj) {
  const std::size_t n = adj.size();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (const auto& [w, weight] : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

inline std::vector<std::size_t> component_of(const Adjacency& adj, std::size_t s) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> comp;
  std::vector<std::size_t> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    comp.push_back(v);
    for (const auto& [w, weight] : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

}  // namespace detail

// Undirected edge betweenness: the number of shortest paths between
// unordered vertex pairs crossing the edge, split evenly over equal-length
// paths. Keys are (u, v) with u < v.
inline std::map<std::pair<std::size_t, std::size_t>, double> edge_betweenness(
    const UnigramGraph& g) {
  detail::Adjacency adj(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) adj[v] = g.neighbors(v);
  std::vector<std::size_t> all(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) all[v] = v;
  std::map<detail::EdgeKey, double> bc;
  for (const Edge& e : g.edges()) bc[{e.u, e.v}] = 0.0;
  detail::accumulate_betweenness(adj, all, bc);
  for (auto& [k, v] : bc) v /= 2.0;
  return bc;
}

// Newman-Girvan weighted modularity of `communities` on `g`.
inline double modularity(const UnigramGraph& g,
                         const std::vector<std::vector<std::size_t>>& communities) {
  const double m = static_cast<double>(g.total_weight());
  if (m == 0) return 0.0;
  std::vector<std::ptrdiff_t> community(g.size(), -1);
  for (std::size_t c = 0; c < communities.size(); ++c) {
    for (std::size_t v : communities[c]) community[v] = static_cast<std::ptrdiff_t>(c);
  }
  std::vector<double> internal(communities.size(), 0.0);
  std::vector<double> strength(communities.size(), 0.0);
  for (const Edge& e : g.edges()) {
    const auto cu = community[e.u];
    const auto cv = community[e.v];
    const double w = static_cast<double>(e.weight);
    if (cu >= 0) strength[cu] += w;
    if (cv >= 0) strength[cv] += w;
    if (cu >= 0 && cu == cv) internal[cu] += w;
  }
  double q = 0;
  for (std::size_t c = 0; c < communities.size(); ++c) {
    const double share = strength[c] / (2.0 * m);
    q += internal[c] / m - share * share;
  }
  return q;
}

struct Partition {
  // Each module sorted by label; modules ordered by their first label.
  std::vector<std::vector<std::string>> modules;
  std::vector<std::string> eliminated;
  double modularity = 0;

  std::optional<std::size_t> module_of(std::string_view label) const {
    for (std::size_t m = 0; m < modules.size(); ++m) {
      if (std::binary_search(modules[m].begin(), modules[m].end(), label,
                             [](std::string_view a, std::string_view b) { return a < b; })) {
        return m;
      }
    }
    return std::nullopt;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct EdgeRemoval {
  std::string u;
  std::string v;
  double betweenness = 0;
  std::size_t components_after = 0;
};

struct SplitRecord {
  std::size_t removals = 0;  // edges removed before this split
  std::vector<std::vector<std::string>> components;
  double modularity = 0;
  bool eligible = false;
};

struct GirvanNewmanResult {
  Partition partition;
  std::vector<EdgeRemoval> removals;
  std::vector<SplitRecord> splits;
  std::optional<std::size_t> selected_split;

  std::string trace_csv() const {
    std::string out = "step,u,v,betweenness,components\n";
    for (std::size_t i = 0; i < removals.size(); ++i) {
      const auto& r = removals[i];
      out += csv::row({std::to_string(i + 1), r.u, r.v, text::format_double(r.betweenness),
                       std::to_string(r.components_after)});
    }
    return out;
  }
};

inline GirvanNewmanResult girvan_newman(const UnigramGraph& g, std::size_t min_cluster_size = 2,
                                        Diagnostics* diag = nullptr) {
  if (g.empty()) throw Error(ErrorCode::kEmptyInput, "girvan-newman on an empty graph");
  if (min_cluster_size < 1) {
    throw Error(ErrorCode::kConfiguration, "minimum cluster size must be >= 1");
  }
  GirvanNewmanResult result;
  if (g.edge_count() == 0) {
    warn(diag, "graph has no edges; every vertex eliminated");
    result.partition.eliminated = g.labels();
    std::sort(result.partition.eliminated.begin(), result.partition.eliminated.end());
    return result;
  }

  auto labelled = [&](const std::vector<std::vector<std::size_t>>& comps) {
    std::vector<std::vector<std::string>> out;
    for (const auto& c : comps) {
      std::vector<std::string> names;
      for (std::size_t v : c) names.push_back(g.label(v));
      std::sort(names.begin(), names.end());
      out.push_back(std::move(names));
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  auto record = [&](const std::vector<std::vector<std::size_t>>& comps, std::size_t removals) {
    SplitRecord s;
    s.removals = removals;
    s.components = labelled(comps);
    s.modularity = modularity(g, comps);
    s.eligible = std::all_of(comps.begin(), comps.end(), [&](const auto& c) {
      return c.size() == 1 || c.size() >= min_cluster_size;
    });
    result.splits.push_back(std::move(s));
  };

  // Scores are kept as ordered-pair sums, twice the undirected value.
  detail::Adjacency adj(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) adj[v] = g.neighbors(v);
  std::map<detail::EdgeKey, double> bc;
  {
    std::vector<std::size_t> all(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) all[v] = v;
    for (const Edge& e : g.edges()) bc[{e.u, e.v}] = 0.0;
    detail::accumulate_betweenness(adj, all, bc);
  }
  auto comps = detail::components(adj);
  record(comps, 0);

  std::size_t removed = 0;
  while (!bc.empty()) {
    double best = -1;
    for (const auto& [k, v] : bc) best = std::max(best, v);
    const detail::EdgeKey* pick = nullptr;
    std::pair<std::string, std::string> pick_labels;
    for (const auto& [k, v] : bc) {
      if (!detail::same_length(v, best)) continue;
      std::pair<std::string, std::string> labels =
          std::minmax(g.label(k.first), g.label(k.second));
      if (pick == nullptr || labels < pick_labels) {
        pick = &k;
        pick_labels = std::move(labels);
      }
    }
    const auto [u, v] = *pick;
    adj[u].erase(v);
    adj[v].erase(u);
    bc.erase(detail::edge_key(u, v));
    ++removed;

    // Betweenness changes only inside the components holding u and v.
    auto cu = detail::component_of(adj, u);
    std::vector<std::size_t> touched = cu;
    if (!std::binary_search(cu.begin(), cu.end(), v)) {
      auto cv = detail::component_of(adj, v);
      touched.insert(touched.end(), cv.begin(), cv.end());
    }
    std::set<std::size_t> touched_set(touched.begin(), touched.end());
    for (auto& [k, val] : bc) {
      if (touched_set.count(k.first) != 0) val = 0.0;
    }
    detail::accumulate_betweenness(adj, touched, bc);

    auto next = detail::components(adj);
    result.removals.push_back({pick_labels.first, pick_labels.second, best / 2.0, next.size()});
    if (next.size() != comps.size()) {
      comps = std::move(next);
      record(comps, removed);
    }
  }
  for (std::size_t i = 0; i < result.splits.size(); ++i) {
    const auto& s = result.splits[i];
    if (!s.eligible) continue;
    if (!result.selected_split ||
        s.modularity > result.splits[*result.selected_split].modularity + 1e-12) {
      result.selected_split = i;
    }
  }
  if (!result.selected_split) {
    warn(diag, "no split satisfies the minimum cluster size; every vertex eliminated");
    result.partition.eliminated = g.labels();
    std::sort(result.partition.eliminated.begin(), result.partition.eliminated.end());
    return result;
  }
  const auto& chosen = result.splits[*result.selected_split];
  for (const auto& c : chosen.components) {
    if (c.size() == 1) {
      result.partition.eliminated.push_back(c[0]);
    } else {
      result.partition.modules.push_back(c);
    }
  }
  std::sort(result.partition.eliminated.begin(), result.partition.eliminated.end());
  result.partition.modularity = chosen.modularity;
  return result;
}

// Throws unless modules and eliminated vertices partition the graph's
// vertex set.
inline void validate_partition(const UnigramGraph& g, const Partition& p) {
  std::set<std::string> seen;
  auto add = [&](const std::string& label) {
    if (!g.find(label)) {
      throw Error(ErrorCode::kValidation, "partition names unknown vertex '" + label + "'");
    }
    if (!seen.insert(label).second) {
      throw Error(ErrorCode::kValidation, "vertex '" + label + "' appears twice in partition");
    }
  };
  for (const auto& m : p.modules) {
    for (const auto& v : m) add(v);
  }
  for (const auto& v : p.eliminated) add(v);
  if (seen.size() != g.size()) {
    throw Error(ErrorCode::kValidation, "partition does not cover every vertex");
  }
}

enum class Verdict { kModule, kAntiModule };

inline std::string to_string(Verdict v) {
  return v == Verdict::kModule ? "module" : "anti_module";
}

struct ModuleReport {
  std::size_t module = 0;
  std::vector<std::string> members;
  std::vector<double> within;  // per member, weight to other members
  std::vector<double> cross;   // per member, weight to non-members
  stats::TestResult test;
  Verdict verdict = Verdict::kAntiModule;
};

// Wilcoxon rank-sum of within-module against cross-module vertex strengths;
// p <= alpha is a module, otherwise an anti-module.
inline std::vector<ModuleReport> module_significance(const UnigramGraph& g, const Partition& p,
                                                     double alpha = 0.05,
                                                     Diagnostics* diag = nullptr) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kConfiguration, "alpha must lie in (0, 1)");
  }
  validate_partition(g, p);
  std::vector<ModuleReport> out;
  for (std::size_t m = 0; m < p.modules.size(); ++m) {
    ModuleReport r;
    r.module = m;
    r.members = p.modules[m];
    std::set<std::size_t> inside;
    for (const auto& label : r.members) inside.insert(g.require(label));
    for (const auto& label : r.members) {
      double in = 0, out_w = 0;
      for (const auto& [n, w] : g.neighbors(g.require(label))) {
        (inside.count(n) != 0 ? in : out_w) += static_cast<double>(w);
      }
      r.within.push_back(in);
      r.cross.push_back(out_w);
    }
    auto zero = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
    };
    if (zero(r.within) && zero(r.cross)) {
      warn(diag, "module " + std::to_string(m) + " has no edges; significance skipped");
      continue;
    }
    r.test = stats::wilcoxon_rank_sum(r.within, r.cross);
    r.verdict = r.test.p_value <= alpha ? Verdict::kModule : Verdict::kAntiModule;
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string module_reports_to_csv(const std::vector<ModuleReport>& reports) {
  auto join_values = [](const std::vector<double>& v) {
    std::vector<std::string> parts;
    for (double x : v) parts.push_back(text::format_double(x));
    return text::join(parts, ";");
  };
  std::string out = "module,members,within,cross,statistic,p_value,method,verdict\n";
  for (const auto& r : reports) {
    out += csv::row({std::to_string(r.module), text::join(r.members, ";"), join_values(r.within),
                     join_values(r.cross), text::format_double(r.test.statistic),
                     text::format_double(r.test.p_value), stats::to_string(r.test.method),
                     to_string(r.verdict)});
  }
  return out;
}

struct DegreeFit {
  std::vector<std::pair<std::size_t, std::size_t>> histogram;  // degree, vertices
  stats::LinearFit fit;
};

// Least-squares fit of log(frequency) on log(degree) over vertices of
// nonzero degree. Unset with fewer than three distinct degrees.
inline std::optional<DegreeFit> degree_distribution_fit(const UnigramGraph& g) {
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (g.degree(v) > 0) ++hist[g.degree(v)];
  }
  if (hist.size() < 3) return std::nullopt;
  DegreeFit out;
  std::vector<double> x, y;
  for (const auto& [d, f] : hist) {
    out.histogram.emplace_back(d, f);
    x.push_back(std::log(static_cast<double>(d)));
    y.push_back(std::log(static_cast<double>(f)));
  }
  out.fit = stats::least_squares(x, y);
  return out;
}

struct ViewNode {
  std::string id;
  bool supervertex = false;
  std::vector<std::string> members;  // the vertex itself for plain nodes
  std::optional<std::size_t> module;
  VertexRole role = VertexRole::kPlain;
  double degree = 0;  // sum of incident view-edge weights
  double relative_degree = 0;
};

struct ViewEdge {
  std::string a;
  std::string b;
  double weight = 0;
  double relative_weight = 0;
};

struct SubgraphView {
  std::string focus;
  std::vector<std::string> extras;
  std::vector<ViewNode> nodes;
  std::vector<ViewEdge> edges;

  const ViewNode* node(std::string_view id) const {
    for (const auto& n : nodes) {
      if (n.id == id) return &n;
    }
    return nullptr;
  }
};

inline std::string supervertex_id(std::size_t module) { return "module:" + std::to_string(module); }

// Focus and extras stay individual vertices. The focus's other neighbours
// collapse into one supervertex per partition module; eliminated neighbours
// stay individual. View edge weights sum the member edge weights, and
// relative values are shares of the view's totals.
inline SubgraphView ego_subgraph(const UnigramGraph& g, std::string_view focus,
                                 const std::vector<std::string>& extras, const Partition& p,
                                 Diagnostics* diag = nullptr) {
  auto f = g.find(focus);
  if (!f) throw Error(ErrorCode::kLookup, "focus '" + std::string(focus) + "' not in graph");
  SubgraphView view;
  view.focus = std::string(focus);

  std::map<std::string, std::vector<std::size_t>> groups;  // node id -> members
  std::map<std::string, ViewNode> nodes;
  auto add_single = [&](std::size_t v) {
    const std::string& label = g.label(v);
    if (nodes.count(label) != 0) return;
    ViewNode n;
    n.id = label;
    n.members = {label};
    n.module = p.module_of(label);
    n.role = g.role(v);
    nodes[label] = n;
    groups[label] = {v};
  };
  add_single(*f);
  for (const auto& e : extras) {
    auto v = g.find(e);
    if (!v) {
      warn(diag, "extra vertex '" + e + "' not in graph; omitted from view");
      continue;
    }
    if (*v == *f) continue;
    if (std::find(view.extras.begin(), view.extras.end(), e) == view.extras.end()) {
      view.extras.push_back(e);
    }
    add_single(*v);
  }
  std::sort(view.extras.begin(), view.extras.end());
  for (const auto& [n, w] : g.neighbors(*f)) {
    const std::string& label = g.label(n);
    if (nodes.count(label) != 0) continue;
    auto m = p.module_of(label);
    if (!m) {
      add_single(n);
      continue;
    }
    const std::string id = supervertex_id(*m);
    auto& node = nodes[id];
    if (node.id.empty()) {
      node.id = id;
      node.supervertex = true;
      node.module = m;
    }
    node.members.push_back(label);
    groups[id].push_back(n);
  }
  for (auto& [id, node] : nodes) std::sort(node.members.begin(), node.members.end());

  std::vector<std::string> ids;
  for (const auto& [id, node] : nodes) ids.push_back(id);
  double total = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      double w = 0;
      for (std::size_t a : groups[ids[i]]) {
        for (std::size_t b : groups[ids[j]]) w += static_cast<double>(g.weight(a, b));
      }
      if (w == 0) continue;
      view.edges.push_back({ids[i], ids[j], w, 0});
      nodes[ids[i]].degree += w;
      nodes[ids[j]].degree += w;
      total += w;
    }
  }
  for (auto& e : view.edges) e.relative_weight = total > 0 ? e.weight / total : 0.0;
  for (auto& [id, node] : nodes) {
    node.relative_degree = total > 0 ? node.degree / (2.0 * total) : 0.0;
    view.nodes.push_back(node);
  }
  return view;
}

}  // namespace qdakit
