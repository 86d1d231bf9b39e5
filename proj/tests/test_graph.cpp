#include <doctest.h>

#include "floqscar/errors.hpp"
#include "floqscar/graph.hpp"
#include "floqscar/hamiltonian.hpp"

#include <algorithm>
#include <map>
#include <set>

using namespace floqscar;

namespace {

struct MinusGraph {
  FockSpace space = half_filled_space(6);
  std::vector<std::size_t> refs;
  AdjacencyGraph graph;

  MinusGraph() {
    // U = u0 - um on the middle half period of the (4.4, 5.6) drive.
    const Eigen::MatrixXd h = build_effective(space, 1.0, 10.0, 4.4 - 5.6, EffectiveBranch::Minus);
    refs = {space.index_of_label("↓↑↑↓↓↑"), space.index_of_label("↑↓↓↑↑↓")};
    graph = build_adjacency(h, space, doublon_free_states(space), refs);
  }
};

std::string flip(std::string label) {
  std::string out;
  for (std::size_t k = 0; k < label.size();) {
    const std::string up = "↑";
    const std::string dn = "↓";
    if (label.compare(k, up.size(), up) == 0) {
      out += dn;
      k += up.size();
    } else if (label.compare(k, dn.size(), dn) == 0) {
      out += up;
      k += dn.size();
    } else {
      out += label[k++];
    }
  }
  return out;
}

} // namespace

TEST_CASE("L = 6 doublon-free graph under the minus-branch Hamiltonian") {
  const MinusGraph m;
  CHECK(m.graph.vertices.size() == 20);
  std::size_t refs = 0;
  for (std::size_t k = 0; k < m.graph.vertices.size(); ++k) {
    if (m.graph.vertices[k].role != VertexRole::Reference) continue;
    ++refs;
    CHECK(m.graph.degree(k) >= 1);
  }
  CHECK(refs == 2);
  for (const auto& e : m.graph.edges) {
    CHECK(e.a < e.b);
    CHECK(e.weight > 0.0);
  }
}

TEST_CASE("property: the minus-branch graph is invariant under the global spin flip") {
  const MinusGraph m;
  std::map<std::string, std::size_t> pos;
  for (std::size_t k = 0; k < m.graph.vertices.size(); ++k) pos[m.graph.vertices[k].label] = k;
  std::set<std::tuple<std::size_t, std::size_t, long long>> edges, flipped;
  for (const auto& e : m.graph.edges) {
    edges.emplace(e.a, e.b, std::llround(e.weight * 1e12));
    std::size_t a = pos.at(flip(m.graph.vertices[e.a].label));
    std::size_t b = pos.at(flip(m.graph.vertices[e.b].label));
    if (a > b) std::swap(a, b);
    flipped.emplace(a, b, std::llround(e.weight * 1e12));
  }
  CHECK(edges == flipped);
  for (const auto& v : m.graph.vertices) CHECK(m.graph.vertices[pos.at(flip(v.label))].role == v.role);
}

TEST_CASE("diagonal Hamiltonian gives an edgeless graph") {
  const auto space = half_filled_space(4);
  const Eigen::MatrixXd h = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(space.dim()), 0.0, 1.0).asDiagonal();
  const auto g = build_adjacency(h, space, doublon_free_states(space), {});
  CHECK(g.vertices.size() == 6);
  CHECK(g.edges.empty());
}

TEST_CASE("edge set does not depend on the vertex order given") {
  const MinusGraph m;
  const Eigen::MatrixXd h = build_effective(m.space, 1.0, 10.0, 4.4 - 5.6, EffectiveBranch::Minus);
  auto verts = doublon_free_states(m.space);
  std::reverse(verts.begin(), verts.end());
  CHECK(build_adjacency(h, m.space, verts, m.refs) == m.graph);
}

TEST_CASE("exports: DOT node count, JSON round trip, empty graph") {
  const MinusGraph m;
  const std::string dot = export_graph(m.graph, GraphFormat::Dot);
  std::size_t nodes = 0;
  for (std::size_t p = dot.find("[label="); p != std::string::npos; p = dot.find("[label=", p + 1)) ++nodes;
  CHECK(nodes == 20);
  CHECK(dot.find("role=reference") != std::string::npos);
  CHECK(dot.find("weight=") != std::string::npos);
  CHECK(export_graph(m.graph, GraphFormat::Dot) == dot);

  CHECK(graph_from_json(export_graph(m.graph, GraphFormat::Json)) == m.graph);
  const AdjacencyGraph empty;
  CHECK(graph_from_json(export_graph(empty, GraphFormat::Json)) == empty);
  CHECK(export_graph(empty, GraphFormat::Dot) == "graph adjacency {\n}\n");

  CHECK_THROWS_AS(parse_graph_format("svg"), ParameterError);
  CHECK_THROWS_AS(graph_from_json("{\"vertices\": 3}"), ParseError);
  CHECK_THROWS_AS(graph_from_json("not json"), ParseError);
}
