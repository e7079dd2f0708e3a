#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rgl/graph.hpp"

namespace rgl {

using BigCount = boost::multiprecision::cpp_int;

/// Intrinsic-reasoning condition: a node subset U and an edge subset F of
/// E[U] (the parent edges with both endpoints in U).
struct SubgraphContext {
  std::vector<NodeId> nodes;  // ascending
  EdgeList edges;             // sorted by (from, to)

  friend bool operator==(const SubgraphContext&, const SubgraphContext&) = default;
};

/// Node sequence v0..vL, L >= 1.
using ReasoningPath = std::vector<NodeId>;

/// Sum over U subset of V of 2^|E[U]|. The empty node set contributes 1
/// unless include_empty is false. Graphs above 63 nodes are rejected with
/// std::length_error since the subset counter is 64-bit.
BigCount count_subgraphs(const DirectedGraph& g, bool include_empty = true);

/// Streams every (U, F) pair. Node subsets advance as a binary counter over
/// node bits (bit i = node i); within each U the edge subsets of E[U] advance
/// the same way over E[U] in sorted order.
class SubgraphEnumerator {
 public:
  explicit SubgraphEnumerator(const DirectedGraph& g, bool include_empty = true);

  std::optional<SubgraphContext> next();

 private:
  void load_node_subset();

  const DirectedGraph* graph_;
  std::vector<std::uint64_t> out_mask_;
  std::uint64_t node_subset_ = 0;
  std::uint64_t node_subset_end_ = 0;
  EdgeList induced_;
  std::uint64_t edge_subset_ = 0;
  bool exhausted_ = false;
};

std::vector<SubgraphContext> enumerate_subgraphs(const DirectedGraph& g,
                                                 std::optional<std::uint64_t> limit,
                                                 bool include_empty = true);

/// Graph on the parent's node set carrying only the context edges.
/// Throws std::invalid_argument if a context edge is not a parent edge or
/// leaves the node subset.
DirectedGraph context_graph(const DirectedGraph& parent, const SubgraphContext& context);

struct LayerDecomposition {
  NodeId source = 0;
  NodeId target = 0;
  std::size_t distance = 0;
  /// layers[i] = { v : dist(s, v) = i and dist(v, t) = d - i }, ascending.
  std::vector<std::vector<NodeId>> layers;
  /// Edges from layers[i] into layers[i + 1].
  std::vector<std::size_t> layer_edges;
  /// layer_edges[i] / (|V_i| * |V_{i+1}|).
  std::vector<double> densities;
};

/// Throws UnreachableError when t is not reachable from s and
/// std::invalid_argument when s == t.
LayerDecomposition shortest_path_layers(const DirectedGraph& g, NodeId s, NodeId t);

/// Product over layers of sqrt(rho_i * |V_i| * |V_{i+1}|).
double path_count_bound(const LayerDecomposition& d);

/// All shortest s -> t paths in lexicographic order, truncated to `cap`.
/// Throws UnreachableError when t is not reachable and
/// std::invalid_argument when s == t.
std::vector<ReasoningPath> enumerate_shortest_paths(const DirectedGraph& g, NodeId s, NodeId t,
                                                    std::optional<std::size_t> cap = std::nullopt);

/// Same, reusing a decomposition already computed for (s, t).
std::vector<ReasoningPath> enumerate_layer_paths(const DirectedGraph& g, const LayerDecomposition& d,
                                                 std::optional<std::size_t> cap = std::nullopt);

struct PathSample {
  NodeId source = 0;
  NodeId target = 0;
  ReasoningPath path;

  friend bool operator==(const PathSample&, const PathSample&) = default;
};

/// Shortest paths for every reachable ordered pair, ordered by (source,
/// target) and then lexicographically. Pairs are processed in parallel.
std::vector<PathSample> extrinsic_universe(const DirectedGraph& g,
                                           std::optional<std::size_t> cap_per_pair = std::nullopt);

/// Context filter for intrinsic corpora: keep an (s, t) query only if the
/// context yields at least `min_paths` shortest paths for it.
struct PathCountFilter {
  std::size_t min_paths = 1;

  bool accepts(std::size_t path_count) const { return path_count >= min_paths; }
};

}  // namespace rgl
