#include "floqscar/graph.hpp"

#include "floqscar/errors.hpp"
#include "floqscar/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace floqscar {

std::size_t AdjacencyGraph::degree(std::size_t vertex) const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(), [&](const GraphEdge& e) { return e.a == vertex || e.b == vertex; }));
}

AdjacencyGraph build_adjacency(const Eigen::MatrixXd& h, const FockSpace& space,
                               std::vector<std::size_t> vertex_set, const std::vector<std::size_t>& references,
                               double weight_floor) {
  if (h.rows() != h.cols() || static_cast<std::size_t>(h.rows()) != space.dim())
    throw DimensionError("Hamiltonian does not match the basis");
  if (!(weight_floor >= 0.0)) throw ParameterError("weight floor must be non-negative");
  std::sort(vertex_set.begin(), vertex_set.end());
  vertex_set.erase(std::unique(vertex_set.begin(), vertex_set.end()), vertex_set.end());
  AdjacencyGraph g;
  for (std::size_t v : vertex_set) {
    if (v >= space.dim()) throw ParameterError("vertex outside the basis");
    const bool ref = std::find(references.begin(), references.end(), v) != references.end();
    g.vertices.push_back({v, space.label(v), ref ? VertexRole::Reference : VertexRole::Other});
  }
  for (std::size_t a = 0; a < vertex_set.size(); ++a) {
    for (std::size_t b = a + 1; b < vertex_set.size(); ++b) {
      const auto i = static_cast<Eigen::Index>(vertex_set[a]);
      const auto j = static_cast<Eigen::Index>(vertex_set[b]);
      const double w = std::max(std::abs(h(i, j)), std::abs(h(j, i)));
      if (w > weight_floor) g.edges.push_back({a, b, w});
    }
  }
  return g;
}

std::vector<std::size_t> doublon_free_states(const FockSpace& space) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < space.dim(); ++f)
    if (space.doublons(f) == 0) out.push_back(f);
  return out;
}

GraphFormat parse_graph_format(std::string_view text) {
  if (text == "dot") return GraphFormat::Dot;
  if (text == "json") return GraphFormat::Json;
  throw ParameterError("unknown graph format '" + std::string(text) + "' (expected dot or json)");
}

namespace {

std::string_view role_name(VertexRole r) { return r == VertexRole::Reference ? "reference" : "other"; }

VertexRole parse_role(std::string_view s) {
  if (s == "reference") return VertexRole::Reference;
  if (s == "other") return VertexRole::Other;
  throw ParseError("unknown vertex role '" + std::string(s) + "'");
}

} // namespace

std::string export_graph(const AdjacencyGraph& g, GraphFormat format) {
  if (format == GraphFormat::Json) {
    nlohmann::ordered_json doc;
    doc["vertices"] = nlohmann::ordered_json::array();
    doc["edges"] = nlohmann::ordered_json::array();
    for (const auto& v : g.vertices)
      doc["vertices"].push_back({{"index", v.index}, {"label", v.label}, {"role", role_name(v.role)}});
    for (const auto& e : g.edges) doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "graph adjacency {\n";
  for (std::size_t k = 0; k < g.vertices.size(); ++k) {
    const auto& v = g.vertices[k];
    out << "  v" << k << " [label=\"" << v.label << "\", index=" << v.index << ", role=" << role_name(v.role)
        << (v.role == VertexRole::Reference ? ", color=red" : ", color=blue") << "];\n";
  }
  for (const auto& e : g.edges)
    out << "  v" << e.a << " -- v" << e.b << " [weight=" << format_double(e.weight) << "];\n";
  out << "}\n";
  return out.str();
}

AdjacencyGraph graph_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
  AdjacencyGraph g;
  try {
    for (const auto& v : doc.at("vertices"))
      g.vertices.push_back({v.at("index").get<std::size_t>(), v.at("label").get<std::string>(),
                            parse_role(v.at("role").get<std::string>())});
    for (const auto& e : doc.at("edges")) {
      GraphEdge edge{e.at("a").get<std::size_t>(), e.at("b").get<std::size_t>(), e.at("weight").get<double>()};
      if (edge.a >= edge.b || edge.b >= g.vertices.size()) throw ParseError("graph JSON: bad edge endpoints");
      if (!(edge.weight > 0.0)) throw ParseError("graph JSON: edge weights must be positive");
      g.edges.push_back(edge);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("graph JSON: ") + e.what());
  }
  return g;
}

} // namespace floqscar
