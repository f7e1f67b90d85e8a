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
#include <string>

#include "support.hpp"

namespace qdakit {
namespace {

UnigramGraph fixture() {
  auto g = testing::two_triangles();
  g.set_role(*g.find("a"), VertexRole::kCategory);
  g.set_role(*g.find("d"), VertexRole::kTransitionalCode);
  g.set_edge("a", "b", 3);
  return g;
}

TEST(GraphMl, RoundTripIsEqual) {
  auto g = fixture();
  auto back = from_graphml(to_graphml(g));
  EXPECT_TRUE(back == g);
  EXPECT_EQ(to_graphml(back), to_graphml(g));
}

TEST(GraphMl, RoundTripOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto g = testing::erdos_renyi(14, 0.25, seed);
    std::mt19937_64 rng(seed);
    for (const auto& e : g.edges()) g.set_edge(e.u, e.v, 1 + rng() % 9);
    g.set_role(0, VertexRole::kCategory);
    ASSERT_TRUE(from_graphml(to_graphml(g)) == g);
  }
}

TEST(GraphMl, EscapesLabels) {
  UnigramGraph g;
  g.add_vertex("a&b");
  g.add_vertex("<c>");
  g.set_edge("a&b", "<c>", 2);
  const std::string xml = to_graphml(g);
  EXPECT_NE(xml.find("a&amp;b"), std::string::npos);
  EXPECT_TRUE(from_graphml(xml) == g);
}

TEST(GraphMl, EmptyGraphIsValidDocument) {
  UnigramGraph g;
  const std::string xml = to_graphml(g);
  EXPECT_NE(xml.find("<graph "), std::string::npos);
  EXPECT_EQ(from_graphml(xml).size(), 0u);
  EXPECT_EQ(to_dot(g), "graph G {\n}\n");
  EXPECT_EQ(to_edge_csv(g), "source,target,weight\n");
}

TEST(GraphMl, RejectsMalformedInput) {
  EXPECT_THROW(from_graphml("<graphml><graph>"), Error);
  EXPECT_THROW(from_graphml("<other/>"), Error);
}

TEST(Export, DeterministicAcrossInsertionOrder) {
  auto g1 = fixture();
  UnigramGraph g2;
  for (const char* v : {"f", "e", "d", "c", "b", "a"}) g2.add_vertex(v);
  g2.set_role(*g2.find("a"), VertexRole::kCategory);
  g2.set_role(*g2.find("d"), VertexRole::kTransitionalCode);
  for (const auto& e : g1.edges()) g2.set_edge(g1.label(e.v), g1.label(e.u), e.weight);
  for (auto f : {GraphFormat::kGraphml, GraphFormat::kDot, GraphFormat::kCsv}) {
    EXPECT_EQ(export_graph(g1, f), export_graph(g2, f));
    EXPECT_EQ(export_graph(g1, f), export_graph(g1, f));
  }
}

TEST(Export, CsvAndDotContent) {
  auto g = testing::four_path();
  EXPECT_EQ(to_edge_csv(g), "source,target,weight\na,b,1\nb,c,1\nc,d,1\n");
  auto r = girvan_newman(g);
  const std::string dot = to_dot(g, &r.partition);
  EXPECT_NE(dot.find("\"a\" [role=plain, module=0, relative_degree=0.16666666666666666];"),
            std::string::npos);
  EXPECT_NE(dot.find("\"c\" -- \"d\" [weight=1];"), std::string::npos);
}

TEST(Export, UnknownFormatIsConfigurationError) {
  try {
    parse_graph_format("png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
  EXPECT_EQ(parse_graph_format("graphml"), GraphFormat::kGraphml);
  EXPECT_EQ(extension(GraphFormat::kDot), ".dot");
}

TEST(Export, ViewFormats) {
  auto g = testing::two_cliques();
  auto r = girvan_newman(g);
  auto view = ego_subgraph(g, "p4", {"q3"}, r.partition);
  const std::string xml = export_graph(view, GraphFormat::kGraphml);
  EXPECT_NE(xml.find("<data key=\"kind\">focus</data>"), std::string::npos);
  EXPECT_NE(xml.find("<data key=\"kind\">extra</data>"), std::string::npos);
  EXPECT_NE(xml.find("<data key=\"kind\">supervertex</data>"), std::string::npos);
  EXPECT_EQ(export_graph(view, GraphFormat::kCsv), export_graph(view, GraphFormat::kCsv));
  EXPECT_EQ(export_graph(view, GraphFormat::kDot).rfind("graph \"p4\" {", 0), 0u);
}

TEST(PartitionCsv, RoundTrip) {
  auto g = testing::graph_of({{"a", "b"}, {"b", "c"}, {"a", "c"}, {"c", "p"}, {"x", "y"}});
  auto r = girvan_newman(g, 3);
  auto back = partition_from_csv(partition_to_csv(r.partition));
  EXPECT_EQ(back, r.partition);
}

}  // namespace
}  // namespace qdakit
