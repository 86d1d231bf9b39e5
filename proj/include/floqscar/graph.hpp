#pragma once

#include "floqscar/basis.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace floqscar {

enum class VertexRole { Reference, Other };

struct GraphVertex {
  std::size_t index; ///< flat index in the sector basis
  std::string label;
  VertexRole role;

  bool operator==(const GraphVertex&) const = default;
};

struct GraphEdge {
  std::size_t a; ///< vertex positions, a < b
  std::size_t b;
  double weight; ///< |H_ab|

  bool operator==(const GraphEdge&) const = default;
};

struct AdjacencyGraph {
  std::vector<GraphVertex> vertices; ///< sorted by flat index
  std::vector<GraphEdge> edges;      ///< sorted by (a, b)

  std::size_t degree(std::size_t vertex) const;
  bool operator==(const AdjacencyGraph&) const = default;
};

/// Edge (a, b) iff |H_ab| > weight_floor, over the given vertex set.
AdjacencyGraph build_adjacency(const Eigen::MatrixXd& h, const FockSpace& space,
                               std::vector<std::size_t> vertex_set, const std::vector<std::size_t>& references,
                               double weight_floor = 1e-12);

/// Flat indices of the doublon-free states.
std::vector<std::size_t> doublon_free_states(const FockSpace& space);

enum class GraphFormat { Dot, Json };

GraphFormat parse_graph_format(std::string_view text);
std::string export_graph(const AdjacencyGraph& g, GraphFormat format);
AdjacencyGraph graph_from_json(std::string_view text);

} // namespace floqscar
