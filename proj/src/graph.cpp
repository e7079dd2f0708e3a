#include "rgl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "rgl/errors.hpp"
#include "rgl/rng.hpp"

namespace rgl {

DirectedGraph::DirectedGraph(std::size_t node_count, EdgeList edges,
                             std::optional<std::vector<std::uint32_t>> community,
                             std::uint64_t seed)
    : node_count_(node_count), seed_(seed), edges_(std::move(edges)),
      community_(std::move(community)) {
  if (node_count_ > std::numeric_limits<NodeId>::max()) {
    throw std::invalid_argument("node count exceeds NodeId range");
  }
  std::sort(edges_.begin(), edges_.end());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.from >= node_count_ || e.to >= node_count_) {
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.from) +
                                  " -> " + std::to_string(e.to));
    }
    if (e.from == e.to) {
      throw std::invalid_argument("self-loop on node " + std::to_string(e.from));
    }
    if (i > 0 && edges_[i - 1] == e) {
      throw std::invalid_argument("duplicate edge " + std::to_string(e.from) + " -> " +
                                  std::to_string(e.to));
    }
  }
  if (community_ && community_->size() != node_count_) {
    throw std::invalid_argument("community map must cover every node");
  }

  out_offsets_.assign(node_count_ + 1, 0);
  in_offsets_.assign(node_count_ + 1, 0);
  for (const Edge& e : edges_) {
    ++out_offsets_[e.from + 1];
    ++in_offsets_[e.to + 1];
  }
  for (std::size_t v = 0; v < node_count_; ++v) {
    out_offsets_[v + 1] += out_offsets_[v];
    in_offsets_[v + 1] += in_offsets_[v];
  }
  out_targets_.resize(edges_.size());
  in_sources_.resize(edges_.size());
  std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out_targets_[i] = edges_[i].to;  // edges_ is sorted, so rows are contiguous
    in_sources_[in_fill[edges_[i].to]++] = edges_[i].from;
  }
}

std::span<const NodeId> DirectedGraph::successors(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("node id out of range");
  return {out_targets_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
}

std::span<const NodeId> DirectedGraph::predecessors(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("node id out of range");
  return {in_sources_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
}

bool DirectedGraph::has_edge(NodeId from, NodeId to) const {
  if (from >= node_count_ || to >= node_count_) return false;
  const auto row = successors(from);
  return std::binary_search(row.begin(), row.end(), to);
}

namespace {

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

DirectedGraph generate_er(std::size_t n, double p, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_er: n must be >= 1");
  check_probability(p, "p");
  Rng rng(seed);
  EdgeList edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return DirectedGraph(n, std::move(edges), std::nullopt, seed);
}

DirectedGraph generate_sbm(std::size_t n, std::size_t k, double p_in, double p_out,
                           std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate_sbm: n must be >= 1");
  if (k == 0 || k > n) throw std::invalid_argument("generate_sbm: need 1 <= k <= n");
  check_probability(p_in, "p_in");
  check_probability(p_out, "p_out");

  std::vector<std::uint32_t> community(n);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t next = 0;
  for (std::uint32_t c = 0; c < k; ++c) {
    const std::size_t size = base + (c < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) community[next++] = c;
  }

  Rng rng(seed);
  EdgeList edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u == v) continue;
      const double p = community[u] == community[v] ? p_in : p_out;
      if (rng.bernoulli(p)) edges.push_back({u, v});
    }
  }
  return DirectedGraph(n, std::move(edges), std::move(community), seed);
}

DegreeProfile degree_profile(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  DegreeProfile profile;
  profile.out_degree.resize(n);
  profile.zscore.assign(n, 0.0);
  if (n == 0) return profile;

  double sum = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    profile.out_degree[v] = g.out_degree(v);
    sum += static_cast<double>(profile.out_degree[v]);
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t d : profile.out_degree) {
    const double diff = static_cast<double>(d) - mean;
    ss += diff * diff;
  }
  const double stddev = std::sqrt(ss / static_cast<double>(n));
  if (stddev == 0.0) return profile;
  for (NodeId v = 0; v < n; ++v) {
    profile.zscore[v] = (static_cast<double>(profile.out_degree[v]) - mean) / stddev;
  }
  return profile;
}

std::vector<std::size_t> bfs_distances(const DirectedGraph& g, NodeId origin,
                                       Direction direction) {
  if (!g.contains(origin)) throw std::out_of_range("node id out of range");
  std::vector<std::size_t> dist(g.node_count(), kUnreachable);
  std::deque<NodeId> frontier{origin};
  dist[origin] = 0;
  while (!frontier.empty()) {
    const NodeId x = frontier.front();
    frontier.pop_front();
    const auto next = direction == Direction::forward ? g.successors(x) : g.predecessors(x);
    for (NodeId y : next) {
      if (dist[y] != kUnreachable) continue;
      dist[y] = dist[x] + 1;
      frontier.push_back(y);
    }
  }
  return dist;
}

std::optional<std::size_t> hop_distance(const DirectedGraph& g, NodeId u, NodeId v) {
  if (!g.contains(u) || !g.contains(v)) throw std::out_of_range("node id out of range");
  if (u == v) return 0;
  const std::size_t d = bfs_distances(g, u)[v];
  if (d == kUnreachable) return std::nullopt;
  return d;
}

std::vector<std::pair<NodeId, NodeId>> reachable_pairs(const DirectedGraph& g) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    const auto dist = bfs_distances(g, s);
    for (NodeId t = 0; t < g.node_count(); ++t) {
      if (t != s && dist[t] != kUnreachable) pairs.emplace_back(s, t);
    }
  }
  return pairs;
}

void write_graph(std::ostream& out, const DirectedGraph& g) {
  out << "graph " << g.node_count() << ' ' << g.seed() << '\n';
  if (g.community()) {
    const auto& c = *g.community();
    for (std::size_t v = 0; v < c.size(); ++v) out << "community " << v << ' ' << c[v] << '\n';
  }
  for (const Edge& e : g.edges()) out << "edge " << e.from << ' ' << e.to << '\n';
}

void write_graph(const std::filesystem::path& path, const DirectedGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_graph(out, g);
  if (!out) throw DataError("write failed: " + path.string());
}

namespace {

std::uint64_t parse_uint(const std::string& token, std::size_t line_no) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
    throw FormatError("graph line " + std::to_string(line_no) + ": expected an unsigned integer, got '" +
                      token + "'");
  }
  try {
    return std::stoull(token);
  } catch (const std::out_of_range&) {
    throw FormatError("graph line " + std::to_string(line_no) + ": integer out of range");
  }
}

}  // namespace

DirectedGraph parse_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> node_count;
  std::uint64_t seed = 0;
  EdgeList edges;
  std::vector<std::uint32_t> community;
  std::vector<bool> community_seen;
  std::size_t community_lines = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind, a, b, extra;
    fields >> kind >> a >> b;
    if (a.empty() || b.empty() || (fields >> extra)) {
      throw FormatError("graph line " + std::to_string(line_no) + ": expected '<kind> <a> <b>'");
    }
    if (kind == "graph") {
      if (node_count) throw FormatError("graph line " + std::to_string(line_no) + ": repeated header");
      node_count = parse_uint(a, line_no);
      seed = parse_uint(b, line_no);
      community.assign(*node_count, 0);
      community_seen.assign(*node_count, false);
      continue;
    }
    if (!node_count) throw FormatError("graph: missing 'graph <node_count> <seed>' header");
    const std::uint64_t x = parse_uint(a, line_no);
    const std::uint64_t y = parse_uint(b, line_no);
    if (kind == "community") {
      if (x >= *node_count || community_seen[x]) {
        throw FormatError("graph line " + std::to_string(line_no) + ": bad community entry");
      }
      community_seen[x] = true;
      community[x] = static_cast<std::uint32_t>(y);
      ++community_lines;
    } else if (kind == "edge") {
      edges.push_back({static_cast<NodeId>(x), static_cast<NodeId>(y)});
      if (x >= *node_count || y >= *node_count) {
        throw FormatError("graph line " + std::to_string(line_no) + ": edge endpoint out of range");
      }
    } else {
      throw FormatError("graph line " + std::to_string(line_no) + ": unknown record '" + kind + "'");
    }
  }
  if (!node_count) throw FormatError("graph: missing 'graph <node_count> <seed>' header");
  if (community_lines != 0 && community_lines != *node_count) {
    throw FormatError("graph: community map must cover every node");
  }
  try {
    return DirectedGraph(*node_count, std::move(edges),
                         community_lines ? std::optional(std::move(community)) : std::nullopt, seed);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("graph: ") + e.what());
  }
}

DirectedGraph read_graph(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open graph file " + path.string());
  return parse_graph(in);
}

}  // namespace rgl
