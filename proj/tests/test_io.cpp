#include <gtest/gtest.h>

#include <sstream>

#include "twoforest/io.hpp"
#include "twoforest/lattice.hpp"

using namespace twoforest;

namespace {

ErrorKind parse_error_kind(const std::string& text, const std::string& boundary) {
  std::istringstream in(text);
  try {
    io::parse_edge_list(in, boundary);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::TooLarge;  // sentinel: nothing thrown
}

}  // namespace

TEST(EdgeList, ParsesLabelsWeightsAndComments) {
  std::istringstream in("# weighted path\nu v 2\n\nv b 0.5   # trailing comment\n");
  const WeightedGraph g = io::parse_edge_list(in, "b");
  EXPECT_EQ(g.vertex_count(), 3u);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.label(g.boundary()), "b");
  EXPECT_EQ(g.edge(0).c, 2.0);
  EXPECT_EQ(g.edge(1).c, 0.5);
  EXPECT_EQ(g.label(g.edge(0).u), "u");
}

TEST(EdgeList, Errors) {
  EXPECT_EQ(parse_error_kind("u v\nv\n", "u"), ErrorKind::ParseError);
  EXPECT_EQ(parse_error_kind("u v abc\n", "u"), ErrorKind::ParseError);
  EXPECT_EQ(parse_error_kind("u v 1 extra\n", "u"), ErrorKind::ParseError);
  EXPECT_EQ(parse_error_kind("u v -2\n", "u"), ErrorKind::NonpositiveConductance);
  EXPECT_EQ(parse_error_kind("u u\nu v\n", "u"), ErrorKind::SelfLoop);
  EXPECT_EQ(parse_error_kind("a b\nc d\n", "a"), ErrorKind::DisconnectedGraph);
  EXPECT_EQ(parse_error_kind("a b\n", "z"), ErrorKind::InvalidBoundary);
  EXPECT_EQ(parse_error_kind("# nothing\n", "a"), ErrorKind::EmptyGraph);
  std::istringstream in("u v\nv w x y\n");
  try {
    io::parse_edge_list(in, "u");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(JsonGraph, ParsesAndOverridesBoundary) {
  const io::Json doc = io::parse_json_text(R"({"vertices": 3, "boundary": 2, "edges": [[0, 1], [1, 2, 0.5], [2, 0]]})");
  const WeightedGraph g = io::parse_graph_json(doc);
  EXPECT_EQ(g.boundary(), 2u);
  EXPECT_EQ(g.edge(1).c, 0.5);
  EXPECT_EQ(g.edge(0).c, 1.0);
  EXPECT_THROW(io::parse_graph_json(io::parse_json_text(R"({"vertices": 3})")), Error);
  EXPECT_THROW(io::parse_graph_json(io::parse_json_text(R"({"vertices": 2, "edges": [[0, 1, "x"]]})")), Error);
  EXPECT_THROW(io::parse_json_text("{not json"), Error);
}

TEST(JsonGraph, LoadGraphFromFiles) {
  const WeightedGraph k3 = io::load_graph(TWOFOREST_DATA "/k3.json", "");
  EXPECT_EQ(k3.boundary(), 2u);
  EXPECT_EQ(io::load_graph(TWOFOREST_DATA "/k3.json", "0").boundary(), 0u);
  EXPECT_THROW(io::load_graph(TWOFOREST_DATA "/k3.json", "b"), Error);
  const WeightedGraph c4 = io::load_graph(TWOFOREST_DATA "/c4.txt", "b");
  EXPECT_EQ(c4.edge_count(), 4u);
  EXPECT_THROW(io::load_graph(TWOFOREST_DATA "/c4.txt", ""), Error);
  EXPECT_THROW(io::load_graph(TWOFOREST_DATA "/missing.txt", "b"), Error);
}

TEST(MapJson, RoundTrip) {
  const Lattice lat = build_lattice({LatticeFamily::Hexagonal, 2, 2});
  const io::Json doc = io::map_to_json(*lat.map);
  const PlanarEmbedding back = io::parse_map_json(io::parse_json_text(io::dump(doc)));
  EXPECT_EQ(back.rotation(), lat.map->rotation());
  EXPECT_EQ(back.outer_dart(), lat.map->outer_dart());
  EXPECT_EQ(back.face_count(), lat.map->face_count());
  EXPECT_EQ(back.graph().boundary(), lat.graph.boundary());
  EXPECT_EQ(io::dump(io::map_to_json(back)), io::dump(doc));
}

TEST(MapJson, RejectsBadRotation) {
  const char* text = R"({"vertices": 3, "boundary": 0, "edges": [[0, 1], [1, 2], [2, 0]],
                         "rotation": [[0, 5], [1, 2], [3]], "outer_dart": 0})";
  EXPECT_THROW(io::parse_map_json(io::parse_json_text(text)), Error);
}

TEST(Dump, SeventeenDigitsAndLayout) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(2.0), "2");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
  io::Json doc;
  doc["b"] = 1.0 / 3.0;
  doc["a"] = io::Json::array({1, 2, 3});
  doc["nested"] = io::Json::array({io::Json{{"x", 1}}});
  doc["inf"] = std::numeric_limits<double>::infinity();
  const std::string text = io::dump(doc);
  EXPECT_LT(text.find("\"b\""), text.find("\"a\""));
  EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
  EXPECT_NE(text.find("[1, 2, 3]"), std::string::npos);
  EXPECT_NE(text.find("\"inf\": null"), std::string::npos);
  EXPECT_EQ(io::parse_json_text(text)["nested"][0]["x"], 1);
  const std::string compact = io::dump(doc, 0);
  EXPECT_EQ(compact.find('\n'), compact.size() - 1);
}

TEST(Csv, QuotesAndFormats) {
  std::ostringstream out;
  io::CsvWriter csv(out);
  csv.header({"name", "value", "count"});
  csv.row(std::string("a,b"), 0.5, std::size_t{3});
  csv.row("say \"hi\"", 1.0 / 3.0, std::size_t{0});
  EXPECT_EQ(out.str(), "name,value,count\n\"a,b\",0.5,3\n\"say \"\"hi\"\"\",0.33333333333333331,0\n");
}
