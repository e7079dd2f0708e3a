#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rgl {

/// Dense node index in [0, node_count).
using NodeId = std::uint32_t;

struct Edge {
  NodeId from = 0;
  NodeId to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeList = std::vector<Edge>;

/// Underlying reasoning graph: nodes are reasoning states, edges are valid
/// one-step transitions. Immutable after construction.
///
/// Invariants (checked by the constructor): no self-loops, no duplicate
/// edges, endpoints in range, community map (when present) total over nodes.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Edges may arrive in any order; they are stored sorted by (from, to).
  /// Throws std::invalid_argument when an invariant is violated.
  DirectedGraph(std::size_t node_count, EdgeList edges,
                std::optional<std::vector<std::uint32_t>> community = std::nullopt,
                std::uint64_t seed = 0);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint64_t seed() const { return seed_; }

  /// Sorted by (from, to).
  const EdgeList& edges() const { return edges_; }

  /// Ascending node order.
  std::span<const NodeId> successors(NodeId v) const;
  std::span<const NodeId> predecessors(NodeId v) const;

  std::size_t out_degree(NodeId v) const { return successors(v).size(); }
  bool contains(NodeId v) const { return v < node_count_; }
  bool has_edge(NodeId from, NodeId to) const;

  const std::optional<std::vector<std::uint32_t>>& community() const {
    return community_;
  }

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.node_count_ == b.node_count_ && a.seed_ == b.seed_ &&
           a.edges_ == b.edges_ && a.community_ == b.community_;
  }

 private:
  std::size_t node_count_ = 0;
  std::uint64_t seed_ = 0;
  EdgeList edges_;
  std::optional<std::vector<std::uint32_t>> community_;
  std::vector<std::size_t> out_offsets_{0};
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_{0};
  std::vector<NodeId> in_sources_;
};

/// Erdos-Renyi digraph. Draw order: one Bernoulli(p) draw per ordered pair
/// (u, v), u != v, row-major (u outer, v inner), from Rng(seed).
DirectedGraph generate_er(std::size_t n, double p, std::uint64_t seed);

/// Stochastic block model with k contiguous communities. The first n % k
/// communities hold one extra node. Same draw order as generate_er, with
/// p_in for intra-community pairs and p_out otherwise, so k = 1 reproduces
/// generate_er(n, p_in, seed) exactly.
DirectedGraph generate_sbm(std::size_t n, std::size_t k, double p_in, double p_out,
                           std::uint64_t seed);

struct DegreeProfile {
  std::vector<std::size_t> out_degree;
  /// (deg - mean) / population std; all zero when std == 0.
  std::vector<double> zscore;
};

DegreeProfile degree_profile(const DirectedGraph& g);

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

enum class Direction { forward, backward };

/// BFS hop counts from `origin`; kUnreachable where no path exists.
/// Direction::backward follows edges in reverse (distance *to* origin).
std::vector<std::size_t> bfs_distances(const DirectedGraph& g, NodeId origin,
                                       Direction direction = Direction::forward);

/// Shortest directed hop count, 0 when u == v, nullopt when unreachable.
/// Throws std::out_of_range for invalid ids.
std::optional<std::size_t> hop_distance(const DirectedGraph& g, NodeId u, NodeId v);

/// Ordered pairs (u, v), u != v, with a directed path u -> v. Sorted.
std::vector<std::pair<NodeId, NodeId>> reachable_pairs(const DirectedGraph& g);

// Text format:
//   graph <node_count> <seed>
//   community <node> <index>     (optional, one per node)
//   edge <u> <v>
void write_graph(std::ostream& out, const DirectedGraph& g);
void write_graph(const std::filesystem::path& path, const DirectedGraph& g);
/// Throws FormatError on malformed input.
DirectedGraph parse_graph(std::istream& in);
DirectedGraph read_graph(const std::filesystem::path& path);

}  // namespace rgl
