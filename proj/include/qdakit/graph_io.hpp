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

// GraphML, DOT and CSV serialisation of graphs and ego views. Output is
// sorted by label so identical graphs give identical bytes.

#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "qdakit/error.hpp"
#include "qdakit/graph.hpp"
#include "qdakit/text.hpp"

namespace qdakit {

enum class GraphFormat { kGraphml, kDot, kCsv };

inline GraphFormat parse_graph_format(std::string_view s) {
  if (s == "graphml") return GraphFormat::kGraphml;
  if (s == "dot") return GraphFormat::kDot;
  if (s == "csv") return GraphFormat::kCsv;
  throw Error(ErrorCode::kConfiguration, "unknown graph format '" + std::string(s) + "'");
}

inline std::string extension(GraphFormat f) {
  switch (f) {
    case GraphFormat::kGraphml: return ".graphml";
    case GraphFormat::kDot: return ".dot";
    case GraphFormat::kCsv: return ".csv";
  }
  return "";
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::size_t> sorted_vertices(const UnigramGraph& g) {
  std::vector<std::size_t> order(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return g.label(a) < g.label(b); });
  return order;
}

struct LabelledEdge {
  std::string a;
  std::string b;
  std::uint64_t weight;
};

inline std::vector<LabelledEdge> sorted_edges(const UnigramGraph& g) {
  std::vector<LabelledEdge> out;
  for (const Edge& e : g.edges()) {
    auto [a, b] = std::minmax(g.label(e.u), g.label(e.v));
    out.push_back({a, b, e.weight});
  }
  std::sort(out.begin(), out.end(), [](const LabelledEdge& x, const LabelledEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return out;
}

inline double relative_degree(const UnigramGraph& g, std::size_t v) {
  const double total = static_cast<double>(g.total_weight());
  return total > 0 ? static_cast<double>(g.strength(v)) / (2.0 * total) : 0.0;
}

inline long long module_attr(const Partition* p, const std::string& label) {
  if (p == nullptr) return -1;
  auto m = p->module_of(label);
  return m ? static_cast<long long>(*m) : -1;
}

}  // namespace detail

// Vertex attributes: role, module (-1 when eliminated or unpartitioned),
// relative_degree. Edge attribute: weight.
inline std::string to_graphml(const UnigramGraph& g, const Partition* p = nullptr) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n"
      "  <key id=\"module\" for=\"node\" attr.name=\"module\" attr.type=\"int\"/>\n"
      "  <key id=\"relative_degree\" for=\"node\" attr.name=\"relative_degree\" "
      "attr.type=\"double\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n"
      "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (std::size_t v : detail::sorted_vertices(g)) {
    const std::string& label = g.label(v);
    out += "    <node id=\"" + detail::xml_escape(label) + "\">\n";
    out += "      <data key=\"role\">" + to_string(g.role(v)) + "</data>\n";
    out += "      <data key=\"module\">" + std::to_string(detail::module_attr(p, label)) +
           "</data>\n";
    out += "      <data key=\"relative_degree\">" +
           text::format_double(detail::relative_degree(g, v)) + "</data>\n";
    out += "    </node>\n";
  }
  for (const auto& e : detail::sorted_edges(g)) {
    out += "    <edge source=\"" + detail::xml_escape(e.a) + "\" target=\"" +
           detail::xml_escape(e.b) + "\">\n";
    out += "      <data key=\"weight\">" + std::to_string(e.weight) + "</data>\n";
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

// Reads vertices, roles and edge weights back. Other attributes are
// ignored.
inline UnigramGraph from_graphml(std::string_view content) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(content)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::kValidation, std::string("graphml: ") + e.what());
  }
  auto root = tree.get_child_optional("graphml.graph");
  if (!root) throw Error(ErrorCode::kValidation, "graphml: missing <graph>");
  UnigramGraph g;
  for (const auto& [tag, node] : *root) {
    if (tag != "node") continue;
    VertexRole role = VertexRole::kPlain;
    for (const auto& [dtag, data] : node) {
      if (dtag == "data" && data.get<std::string>("<xmlattr>.key", "") == "role") {
        role = parse_vertex_role(data.get_value<std::string>());
      }
    }
    g.add_vertex(node.get<std::string>("<xmlattr>.id"), role);
  }
  for (const auto& [tag, edge] : *root) {
    if (tag != "edge") continue;
    std::uint64_t weight = 1;
    for (const auto& [dtag, data] : edge) {
      if (dtag == "data" && data.get<std::string>("<xmlattr>.key", "") == "weight") {
        const long long w = text::parse_int(data.get_value<std::string>(), "edge weight");
        if (w < 1) throw Error(ErrorCode::kValidation, "graphml: edge weight must be >= 1");
        weight = static_cast<std::uint64_t>(w);
      }
    }
    g.set_edge(edge.get<std::string>("<xmlattr>.source"),
               edge.get<std::string>("<xmlattr>.target"), weight);
  }
  return g;
}

inline std::string to_dot(const UnigramGraph& g, const Partition* p = nullptr) {
  std::string out = "graph G {\n";
  for (std::size_t v : detail::sorted_vertices(g)) {
    const std::string& label = g.label(v);
    out += "  " + detail::dot_quote(label) + " [role=" + to_string(g.role(v)) +
           ", module=" + std::to_string(detail::module_attr(p, label)) +
           ", relative_degree=" + text::format_double(detail::relative_degree(g, v)) + "];\n";
  }
  for (const auto& e : detail::sorted_edges(g)) {
    out += "  " + detail::dot_quote(e.a) + " -- " + detail::dot_quote(e.b) +
           " [weight=" + std::to_string(e.weight) + "];\n";
  }
  return out + "}\n";
}

inline std::string to_edge_csv(const UnigramGraph& g) {
  std::string out = "source,target,weight\n";
  for (const auto& e : detail::sorted_edges(g)) {
    out += csv::row({e.a, e.b, std::to_string(e.weight)});
  }
  return out;
}

inline std::string export_graph(const UnigramGraph& g, GraphFormat format,
                                const Partition* p = nullptr) {
  switch (format) {
    case GraphFormat::kGraphml: return to_graphml(g, p);
    case GraphFormat::kDot: return to_dot(g, p);
    case GraphFormat::kCsv: return to_edge_csv(g);
  }
  throw Error(ErrorCode::kConfiguration, "unknown graph format");
}

inline std::string to_graphml(const SubgraphView& view) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" attr.type=\"string\"/>\n"
      "  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n"
      "  <key id=\"module\" for=\"node\" attr.name=\"module\" attr.type=\"int\"/>\n"
      "  <key id=\"members\" for=\"node\" attr.name=\"members\" attr.type=\"string\"/>\n"
      "  <key id=\"relative_degree\" for=\"node\" attr.name=\"relative_degree\" "
      "attr.type=\"double\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      "  <key id=\"relative_weight\" for=\"edge\" attr.name=\"relative_weight\" "
      "attr.type=\"double\"/>\n"
      "  <graph id=\"" + detail::xml_escape(view.focus) + "\" edgedefault=\"undirected\">\n";
  for (const auto& n : view.nodes) {
    const std::string kind = n.id == view.focus ? "focus"
                             : n.supervertex    ? "supervertex"
                                                : (std::find(view.extras.begin(), view.extras.end(),
                                                             n.id) != view.extras.end()
                                                       ? "extra"
                                                       : "vertex");
    out += "    <node id=\"" + detail::xml_escape(n.id) + "\">\n";
    out += "      <data key=\"kind\">" + kind + "</data>\n";
    out += "      <data key=\"role\">" + to_string(n.role) + "</data>\n";
    out += "      <data key=\"module\">" +
           std::to_string(n.module ? static_cast<long long>(*n.module) : -1) + "</data>\n";
    out += "      <data key=\"members\">" + detail::xml_escape(text::join(n.members, ";")) +
           "</data>\n";
    out += "      <data key=\"relative_degree\">" + text::format_double(n.relative_degree) +
           "</data>\n";
    out += "    </node>\n";
  }
  for (const auto& e : view.edges) {
    out += "    <edge source=\"" + detail::xml_escape(e.a) + "\" target=\"" +
           detail::xml_escape(e.b) + "\">\n";
    out += "      <data key=\"weight\">" + text::format_double(e.weight) + "</data>\n";
    out += "      <data key=\"relative_weight\">" + text::format_double(e.relative_weight) +
           "</data>\n";
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

inline std::string to_dot(const SubgraphView& view) {
  std::string out = "graph " + detail::dot_quote(view.focus) + " {\n";
  for (const auto& n : view.nodes) {
    out += "  " + detail::dot_quote(n.id) + " [members=" +
           detail::dot_quote(text::join(n.members, ";")) +
           ", relative_degree=" + text::format_double(n.relative_degree) + "];\n";
  }
  for (const auto& e : view.edges) {
    out += "  " + detail::dot_quote(e.a) + " -- " + detail::dot_quote(e.b) +
           " [weight=" + text::format_double(e.weight) +
           ", relative_weight=" + text::format_double(e.relative_weight) + "];\n";
  }
  return out + "}\n";
}

inline std::string to_edge_csv(const SubgraphView& view) {
  std::string out = "source,target,weight,relative_weight\n";
  for (const auto& e : view.edges) {
    out += csv::row({e.a, e.b, text::format_double(e.weight),
                     text::format_double(e.relative_weight)});
  }
  return out;
}

inline std::string export_graph(const SubgraphView& view, GraphFormat format) {
  switch (format) {
    case GraphFormat::kGraphml: return to_graphml(view);
    case GraphFormat::kDot: return to_dot(view);
    case GraphFormat::kCsv: return to_edge_csv(view);
  }
  throw Error(ErrorCode::kConfiguration, "unknown graph format");
}

inline std::string partition_to_csv(const Partition& p) {
  std::string out = "vertex,module\n";
  std::vector<std::pair<std::string, long long>> rows;
  for (std::size_t m = 0; m < p.modules.size(); ++m) {
    for (const auto& v : p.modules[m]) rows.emplace_back(v, static_cast<long long>(m));
  }
  for (const auto& v : p.eliminated) rows.emplace_back(v, -1);
  std::sort(rows.begin(), rows.end());
  for (const auto& [v, m] : rows) out += csv::row({v, std::to_string(m)});
  out += "# modularity=" + text::format_double(p.modularity) + "\n";
  return out;
}

inline Partition partition_from_csv(std::string_view content) {
  Partition p;
  std::map<long long, std::vector<std::string>> modules;
  for (const auto& line : text::split_lines(content)) {
    if (line.rfind("# modularity=", 0) == 0) {
      p.modularity = text::parse_double(line.substr(13), "modularity");
    }
  }
  auto rows = csv::parse(content);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].empty() || rows[i][0].rfind("#", 0) == 0) continue;
    if (rows[i].size() != 2) throw Error(ErrorCode::kValidation, "partition CSV: 2 columns");
    const long long m = text::parse_int(rows[i][1], "module");
    if (m < 0) {
      p.eliminated.push_back(rows[i][0]);
    } else {
      modules[m].push_back(rows[i][0]);
    }
  }
  for (auto& [m, members] : modules) {
    std::sort(members.begin(), members.end());
    p.modules.push_back(std::move(members));
  }
  std::sort(p.eliminated.begin(), p.eliminated.end());
  return p;
}

}  // namespace qdakit
