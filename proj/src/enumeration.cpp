#include "rgl/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rgl/errors.hpp"
#include "rgl/parallel.hpp"

namespace rgl {

namespace {

constexpr std::size_t kMaxMaskNodes = 63;

std::vector<std::uint64_t> out_masks(const DirectedGraph& g) {
  if (g.node_count() > kMaxMaskNodes) {
    throw std::length_error("subgraph enumeration supports at most 63 nodes");
  }
  std::vector<std::uint64_t> masks(g.node_count(), 0);
  for (const Edge& e : g.edges()) masks[e.from] |= std::uint64_t{1} << e.to;
  return masks;
}

}  // namespace

BigCount count_subgraphs(const DirectedGraph& g, bool include_empty) {
  const auto masks = out_masks(g);
  const std::size_t n = g.node_count();
  // histogram[k] = number of node subsets U with |E[U]| = k
  std::vector<std::uint64_t> histogram(g.edge_count() + 1, 0);
  const std::uint64_t end = std::uint64_t{1} << n;
  for (std::uint64_t subset = include_empty ? 0 : 1; subset < end; ++subset) {
    std::size_t inside = 0;
    for (std::uint64_t rest = subset; rest != 0; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      inside += static_cast<std::size_t>(std::popcount(masks[v] & subset));
    }
    ++histogram[inside];
  }
  BigCount total = 0;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    if (histogram[k] == 0) continue;
    BigCount term = 1;
    term <<= k;
    total += term * histogram[k];
  }
  return total;
}

SubgraphEnumerator::SubgraphEnumerator(const DirectedGraph& g, bool include_empty)
    : graph_(&g), out_mask_(out_masks(g)) {
  node_subset_ = include_empty ? 0 : 1;
  node_subset_end_ = std::uint64_t{1} << g.node_count();
  exhausted_ = node_subset_ >= node_subset_end_;
  if (!exhausted_) load_node_subset();
}

void SubgraphEnumerator::load_node_subset() {
  induced_.clear();
  for (const Edge& e : graph_->edges()) {
    if ((node_subset_ >> e.from & 1) && (node_subset_ >> e.to & 1)) induced_.push_back(e);
  }
  edge_subset_ = 0;
}

std::optional<SubgraphContext> SubgraphEnumerator::next() {
  if (exhausted_) return std::nullopt;

  SubgraphContext ctx;
  for (std::uint64_t rest = node_subset_; rest != 0; rest &= rest - 1) {
    ctx.nodes.push_back(static_cast<NodeId>(std::countr_zero(rest)));
  }
  for (std::size_t i = 0; i < induced_.size() && i < 64; ++i) {
    if (edge_subset_ >> i & 1) ctx.edges.push_back(induced_[i]);
  }

  // Advance. Edge subsets beyond 2^63 are unreachable in practice, so a
  // 64-bit counter that saturates at 2^min(|E[U]|, 63) is sufficient.
  const std::size_t width = std::min<std::size_t>(induced_.size(), 63);
  if (edge_subset_ + 1 < (std::uint64_t{1} << width)) {
    ++edge_subset_;
  } else if (++node_subset_ < node_subset_end_) {
    load_node_subset();
  } else {
    exhausted_ = true;
  }
  return ctx;
}

std::vector<SubgraphContext> enumerate_subgraphs(const DirectedGraph& g,
                                                 std::optional<std::uint64_t> limit,
                                                 bool include_empty) {
  std::vector<SubgraphContext> out;
  if (limit && *limit == 0) return out;
  SubgraphEnumerator it(g, include_empty);
  while (auto ctx = it.next()) {
    out.push_back(std::move(*ctx));
    if (limit && out.size() >= *limit) break;
  }
  return out;
}

DirectedGraph context_graph(const DirectedGraph& parent, const SubgraphContext& context) {
  std::vector<bool> in_subset(parent.node_count(), false);
  for (NodeId v : context.nodes) {
    if (!parent.contains(v)) throw std::invalid_argument("context node out of range");
    in_subset[v] = true;
  }
  for (const Edge& e : context.edges) {
    if (!parent.has_edge(e.from, e.to)) {
      throw std::invalid_argument("context edge " + std::to_string(e.from) + " -> " +
                                  std::to_string(e.to) + " is not in the parent graph");
    }
    if (!in_subset[e.from] || !in_subset[e.to]) {
      throw std::invalid_argument("context edge leaves the node subset");
    }
  }
  return DirectedGraph(parent.node_count(), context.edges);
}

LayerDecomposition shortest_path_layers(const DirectedGraph& g, NodeId s, NodeId t) {
  if (!g.contains(s) || !g.contains(t)) throw std::out_of_range("node id out of range");
  if (s == t) throw std::invalid_argument("shortest_path_layers: source equals target");
  const auto from_s = bfs_distances(g, s, Direction::forward);
  if (from_s[t] == kUnreachable) {
    throw UnreachableError("node " + std::to_string(t) + " is unreachable from " + std::to_string(s));
  }
  const auto to_t = bfs_distances(g, t, Direction::backward);

  LayerDecomposition d;
  d.source = s;
  d.target = t;
  d.distance = from_s[t];
  d.layers.resize(d.distance + 1);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (from_s[v] == kUnreachable || to_t[v] == kUnreachable) continue;
    if (from_s[v] + to_t[v] == d.distance) d.layers[from_s[v]].push_back(v);
  }
  d.layer_edges.assign(d.distance, 0);
  d.densities.assign(d.distance, 0.0);
  for (std::size_t i = 0; i < d.distance; ++i) {
    for (NodeId x : d.layers[i]) {
      for (NodeId y : g.successors(x)) {
        if (from_s[y] == i + 1 && to_t[y] == d.distance - i - 1) ++d.layer_edges[i];
      }
    }
    d.densities[i] = static_cast<double>(d.layer_edges[i]) /
                     (static_cast<double>(d.layers[i].size()) * static_cast<double>(d.layers[i + 1].size()));
  }
  return d;
}

double path_count_bound(const LayerDecomposition& d) {
  double bound = 1.0;
  for (std::size_t i = 0; i < d.distance; ++i) {
    bound *= std::sqrt(d.densities[i] * static_cast<double>(d.layers[i].size()) *
                       static_cast<double>(d.layers[i + 1].size()));
  }
  return bound;
}

std::vector<ReasoningPath> enumerate_layer_paths(const DirectedGraph& g, const LayerDecomposition& d,
                                                 std::optional<std::size_t> cap) {
  std::vector<ReasoningPath> paths;
  if (cap && *cap == 0) return paths;

  std::vector<std::int64_t> layer_of(g.node_count(), -1);
  for (std::size_t i = 0; i < d.layers.size(); ++i) {
    for (NodeId v : d.layers[i]) layer_of[v] = static_cast<std::int64_t>(i);
  }

  // Iterative DFS over the layered DAG; successors are ascending, so paths
  // come out in lexicographic order.
  ReasoningPath current{d.source};
  std::vector<std::size_t> cursor{0};
  while (!cursor.empty()) {
    const std::size_t depth = current.size() - 1;
    if (depth == d.distance) {
      paths.push_back(current);
      if (cap && paths.size() >= *cap) break;
      current.pop_back();
      cursor.pop_back();
      continue;
    }
    const auto next = g.successors(current.back());
    std::size_t& i = cursor.back();
    while (i < next.size() && layer_of[next[i]] != static_cast<std::int64_t>(depth + 1)) ++i;
    if (i == next.size()) {
      current.pop_back();
      cursor.pop_back();
      continue;
    }
    current.push_back(next[i++]);
    cursor.push_back(0);
  }
  return paths;
}

std::vector<ReasoningPath> enumerate_shortest_paths(const DirectedGraph& g, NodeId s, NodeId t,
                                                    std::optional<std::size_t> cap) {
  return enumerate_layer_paths(g, shortest_path_layers(g, s, t), cap);
}

std::vector<PathSample> extrinsic_universe(const DirectedGraph& g,
                                           std::optional<std::size_t> cap_per_pair) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<PathSample>> per_source(n);
  parallel_for(n, [&](std::size_t source) {
    const auto s = static_cast<NodeId>(source);
    const auto dist = bfs_distances(g, s);
    for (NodeId t = 0; t < n; ++t) {
      if (t == s || dist[t] == kUnreachable) continue;
      for (auto& path : enumerate_shortest_paths(g, s, t, cap_per_pair)) {
        per_source[source].push_back({s, t, std::move(path)});
      }
    }
  });
  std::vector<PathSample> out;
  for (auto& chunk : per_source) {
    std::move(chunk.begin(), chunk.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace rgl
