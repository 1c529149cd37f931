#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "defrauder/model.hpp"

namespace defrauder {

// Sorted, duplicate-free reviewer indices.
using ReviewerSet = std::vector<ReviewerIndex>;

struct GraphEdge {
  std::uint32_t u = 0;  // u < v
  std::uint32_t v = 0;
  ReviewerSet attr;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Attributed graph over product-rating pairs (level 0) or over the edges of
// the previous level (line graphs, level >= 1). Vertices and edges are kept
// in canonical order: level-0 vertices by (product, rating), edges by (u, v).
struct ProductRatingGraph {
  int level = 0;
  std::vector<ReviewerSet> vertex_attr;
  // Level 0: the (product, rating) pair of each vertex.
  std::vector<std::pair<ProductIndex, int>> vertex_key;
  // Level >= 1: index of the parent-graph edge each vertex came from.
  std::vector<std::uint32_t> vertex_origin;
  std::vector<GraphEdge> edges;

  std::size_t num_vertices() const noexcept { return vertex_attr.size(); }
  std::size_t num_edges() const noexcept { return edges.size(); }

  friend bool operator==(const ProductRatingGraph&, const ProductRatingGraph&) = default;
};

// One vertex per reviewed (product, rating) pair. Vertices (p, r) and (q, s)
// with p != q are joined when some reviewer rated p with r and q with s at
// most `tau_t_days` apart; the edge attribute is the set of such reviewers.
ProductRatingGraph build_product_rating_graph(const Dataset& data, double tau_t_days,
                                              unsigned threads = 1);

// Edges become vertices carrying the edge attribute; two of them are joined
// when the original edges share an endpoint and their attributes intersect.
// Throws Error(NoEdges) on an edgeless graph.
ProductRatingGraph line_graph(const ProductRatingGraph& g);

// Debug dump, one edge per line: `u;v;reviewer_id,reviewer_id,...`.
// Level-0 vertices print as `product@rating`, higher levels as `e<parent edge>`.
void write_graph_dump(std::ostream& out, const ProductRatingGraph& g, const Dataset& data);

}  // namespace defrauder
