#include "rgl/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "rgl/metrics.hpp"
#include "rgl/parallel.hpp"
#include "rgl/rng.hpp"

namespace rgl {

TransitionMatrix build_transition(const DirectedGraph& g) {
  TransitionMatrix t(g.node_count());
  for (NodeId x = 0; x < g.node_count(); ++x) {
    const auto next = g.successors(x);
    if (next.empty()) continue;
    const double p = 1.0 / static_cast<double>(next.size());
    for (NodeId y : next) t.at(x, y) = p;
  }
  return t;
}

TransitionPowers::TransitionPowers(const DirectedGraph& g, std::size_t window) {
  if (window == 0) throw std::invalid_argument("context window must be >= 1");
  const std::size_t n = g.node_count();
  powers_.reserve(window);
  powers_.push_back(build_transition(g));
  const TransitionMatrix& step = powers_.front();
  for (std::size_t i = 1; i < window; ++i) {
    const TransitionMatrix& prev = powers_.back();
    TransitionMatrix next(n);
    for (NodeId x = 0; x < n; ++x) {
      for (NodeId z = 0; z < n; ++z) {
        const double w = prev.at(x, z);
        if (w == 0.0) continue;
        for (NodeId y : g.successors(z)) next.at(x, y) += w * step.at(z, y);
      }
    }
    powers_.push_back(std::move(next));
  }
}

MixtureWeights::MixtureWeights(std::vector<double> raw) : raw_(std::move(raw)) {
  if (raw_.empty()) throw std::invalid_argument("mixture weights need K >= 1");
  double sum = 0.0;
  for (double w : raw_) {
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("mixture weights must be finite and >= 0");
    sum += w;
  }
  if (sum <= 0.0) throw std::invalid_argument("mixture weights must not all be zero");
  normalized_.reserve(raw_.size());
  for (double w : raw_) normalized_.push_back(w / sum);
}

std::string MixtureWeights::label() const {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < normalized_.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", normalized_[i]);
    if (i) out += ';';
    out += buf;
  }
  return out;
}

double mixture_prob(const TransitionPowers& powers, const MixtureWeights& weights, NodeId x, NodeId y) {
  if (weights.window() > powers.window()) {
    throw std::invalid_argument("mixture window exceeds the precomputed powers");
  }
  double p = 0.0;
  for (std::size_t i = 1; i <= weights.window(); ++i) p += weights.lambda(i) * powers.power(i).at(x, y);
  return p;
}

MixturePredictor::MixturePredictor(const DirectedGraph& g, MixtureWeights weights)
    : powers_(std::make_shared<const TransitionPowers>(g, weights.window())), weights_(std::move(weights)) {}

MixturePredictor::MixturePredictor(std::shared_ptr<const TransitionPowers> powers, MixtureWeights weights)
    : powers_(std::move(powers)), weights_(std::move(weights)) {
  if (!powers_) throw std::invalid_argument("predictor needs transition powers");
  if (weights_.window() > powers_->window()) {
    throw std::invalid_argument("mixture window exceeds the precomputed powers");
  }
}

std::vector<double> MixturePredictor::distribution(NodeId x) const {
  std::vector<double> p(node_count(), 0.0);
  for (std::size_t i = 1; i <= weights_.window(); ++i) {
    const double lambda = weights_.lambda(i);
    const auto row = powers_->power(i).row(x);
    for (std::size_t y = 0; y < p.size(); ++y) p[y] += lambda * row[y];
  }
  return p;
}

double mixture_prob(const MixturePredictor& m, NodeId x, NodeId y) { return m.prob(x, y); }

// ---------------------------------------------------------------------------

ShortcutAnalysis analyze_shortcut_2hop(const DirectedGraph& g, const TransitionPowers& powers, NodeId v, NodeId m,
                                       NodeId u) {
  if (powers.window() < 2) throw std::invalid_argument("two-hop analysis needs T^2");
  ShortcutAnalysis a;
  a.v = v;
  a.m = m;
  a.u = u;
  a.hops = 2;
  const bool distinct = v != m && m != u && v != u;
  a.edge_vm = g.has_edge(v, m);
  a.edge_vu = g.has_edge(v, u);
  a.hops_match = distinct && !a.edge_vu && a.edge_vm && g.has_edge(m, u);
  a.no_return_to_m = powers.power(2).at(v, m) == 0.0;
  for (NodeId mid : g.successors(v)) {
    if (mid == u || !g.has_edge(mid, u)) continue;
    a.path_mass += Rational(1, static_cast<long long>(g.out_degree(mid)));
    a.path_mass_approx += 1.0 / static_cast<double>(g.out_degree(mid));
  }
  a.premises_hold = a.hops_match && a.no_return_to_m;
  return a;
}

ShortcutAnalysis analyze_shortcut_general(const DirectedGraph& g, const TransitionPowers& powers, NodeId v, NodeId m,
                                          NodeId u, std::size_t d) {
  if (d < 2 || d > powers.window()) throw std::invalid_argument("need 2 <= d <= K");
  ShortcutAnalysis a;
  a.v = v;
  a.m = m;
  a.u = u;
  a.hops = d;
  a.edge_vm = g.has_edge(v, m);
  a.edge_vu = g.has_edge(v, u);
  if (v == u || v == m) return a;

  const auto to_u = bfs_distances(g, u, Direction::backward);
  a.hops_match = to_u[v] == d && a.edge_vm && to_u[m] == d - 1;
  a.no_return_to_m = true;
  for (std::size_t i = 2; i <= powers.window(); ++i) {
    if (powers.power(i).at(v, m) != 0.0) a.no_return_to_m = false;
  }
  if (to_u[v] == d) {
    for (const auto& path : enumerate_shortest_paths(g, v, u)) {
      Rational term = 1;
      double approx = 1.0;
      for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        const auto deg = g.out_degree(path[k]);
        term /= static_cast<long long>(deg);
        approx /= static_cast<double>(deg);
      }
      a.path_mass += term;
      a.path_mass_approx += approx;
    }
  }
  a.premises_hold = a.hops_match && a.no_return_to_m;
  return a;
}

ShortcutDecision decide_shortcut(const ShortcutAnalysis& a, const TransitionPowers& powers,
                                 const MixtureWeights& weights) {
  if (a.hops > weights.window()) throw std::invalid_argument("weights shorter than the shortcut distance");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ShortcutDecision d;
  d.premises_hold = a.premises_hold;

  const double lambda_1 = weights.raw(1);
  const double lambda_d = weights.raw(a.hops);
  const bool mass_positive = a.path_mass > 0;
  d.threshold = mass_positive ? 1.0 / a.path_mass_approx : kInf;
  d.ratio = lambda_1 > 0.0 ? lambda_d / lambda_1 : (lambda_d > 0.0 ? kInf : 0.0);

  if (!mass_positive) {
    d.condition_holds = false;
  } else if (lambda_1 == 0.0) {
    d.lambda1_zero = true;
    d.condition_holds = lambda_d > 0.0;
  } else {
    // lambda_d / lambda_1 > 1 / mass  <=>  lambda_d * mass > lambda_1
    const double lhs = lambda_d * a.path_mass_approx;
    const double gap = lhs - lambda_1;
    if (std::abs(gap) > 1e-9 * (lhs + lambda_1)) {
      d.condition_holds = gap > 0.0;
    } else {
      d.condition_holds = Rational(lambda_d) * a.path_mass > Rational(lambda_1);
    }
  }

  d.p_skip = mixture_prob(powers, weights, a.v, a.u);
  d.p_neighbor = mixture_prob(powers, weights, a.v, a.m);
  d.argmax_flips = d.p_skip > d.p_neighbor;
  return d;
}

ShortcutDecision shortcut_condition_2hop(const DirectedGraph& g, NodeId v, NodeId m, NodeId u,
                                         const MixtureWeights& weights) {
  if (weights.window() != 2) throw std::invalid_argument("two-hop condition needs K = 2");
  const TransitionPowers powers(g, 2);
  return decide_shortcut(analyze_shortcut_2hop(g, powers, v, m, u), powers, weights);
}

ShortcutDecision shortcut_condition_general(const DirectedGraph& g, NodeId v, NodeId m, NodeId u, std::size_t d,
                                            const MixtureWeights& weights) {
  const TransitionPowers powers(g, weights.window());
  return decide_shortcut(analyze_shortcut_general(g, powers, v, m, u, d), powers, weights);
}

std::string to_json(const ShortcutAnalysis& a, const ShortcutDecision& d, const MixtureWeights& w) {
  nlohmann::ordered_json j;
  j["v"] = a.v;
  j["m"] = a.m;
  j["u"] = a.u;
  j["hops"] = a.hops;
  j["lambda"] = w.normalized();
  j["premises_hold"] = d.premises_hold;
  j["condition_holds"] = d.condition_holds;
  j["argmax_flips"] = d.argmax_flips;
  j["lambda1_zero"] = d.lambda1_zero;
  j["path_mass"] = a.path_mass.str();
  j["ratio"] = std::isfinite(d.ratio) ? nlohmann::ordered_json(d.ratio) : nlohmann::ordered_json("inf");
  j["threshold"] = std::isfinite(d.threshold) ? nlohmann::ordered_json(d.threshold) : nlohmann::ordered_json("inf");
  j["p_skip"] = d.p_skip;
  j["p_neighbor"] = d.p_neighbor;
  return j.dump();
}

// ---------------------------------------------------------------------------

Generation greedy_generate(const MixturePredictor& m, NodeId s, NodeId t, std::size_t max_len) {
  if (max_len == 0) throw std::invalid_argument("max_len must be >= 1");
  if (s >= m.node_count() || t >= m.node_count()) throw std::out_of_range("node id out of range");
  Generation gen;
  gen.nodes.push_back(s);
  while (gen.nodes.back() != t && gen.nodes.size() < max_len) {
    const auto p = m.distribution(gen.nodes.back());
    const double top = *std::max_element(p.begin(), p.end());
    if (top <= 0.0) {
      gen.stopped_at_sink = true;
      break;
    }
    // Values equal up to rounding count as ties, so rescaling the weights
    // cannot flip the choice between exactly tied candidates.
    std::size_t best = 0;
    while (p[best] < top * (1.0 - kTieTolerance)) ++best;
    gen.nodes.push_back(static_cast<NodeId>(best));
  }
  gen.reached_target = gen.nodes.back() == t;
  return gen;
}

Generation sample_generate(const MixturePredictor& m, NodeId s, NodeId t, std::size_t max_len, double temperature,
                           std::uint64_t seed) {
  if (max_len == 0) throw std::invalid_argument("max_len must be >= 1");
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
  if (s >= m.node_count() || t >= m.node_count()) throw std::out_of_range("node id out of range");
  Rng rng(seed);
  Generation gen;
  gen.nodes.push_back(s);
  while (gen.nodes.back() != t && gen.nodes.size() < max_len) {
    auto p = m.distribution(gen.nodes.back());
    const double top = *std::max_element(p.begin(), p.end());
    double total = 0.0;
    for (double& x : p) {
      // Relative to the row maximum so small temperatures do not underflow.
      x = x > 0.0 ? std::pow(x / top, 1.0 / temperature) : 0.0;
      total += x;
    }
    if (total <= 0.0) {
      gen.stopped_at_sink = true;
      break;
    }
    const double r = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t pick = p.size();
    for (std::size_t y = 0; y < p.size(); ++y) {
      if (p[y] <= 0.0) continue;
      acc += p[y];
      pick = y;
      if (r < acc) break;
    }
    gen.nodes.push_back(static_cast<NodeId>(pick));
  }
  gen.reached_target = gen.nodes.back() == t;
  return gen;
}

bool verify_suffix_optimality(const DirectedGraph& g, const ReasoningPath& path) {
  if (path.size() < 2) return false;
  for (NodeId v : path) {
    if (!g.contains(v)) return false;
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!g.has_edge(path[i], path[i + 1])) return false;
  }
  const auto to_end = bfs_distances(g, path.back(), Direction::backward);
  const std::size_t length = path.size() - 1;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (to_end[path[k]] != length - k) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

std::vector<SweepRow> compression_sweep(const DirectedGraph& g, std::span<const MixtureWeights> grid,
                                        std::span<const std::pair<NodeId, NodeId>> pairs,
                                        std::optional<std::size_t> max_len) {
  std::vector<SweepRow> rows;
  if (grid.empty()) return rows;
  for (const auto& [s, t] : pairs) {
    if (!g.contains(s) || !g.contains(t)) throw std::out_of_range("sweep pair out of range");
    if (s == t) throw std::invalid_argument("sweep pairs need distinct endpoints");
  }
  std::size_t window = 0;
  for (const auto& w : grid) window = std::max(window, w.window());
  const auto powers = std::make_shared<const TransitionPowers>(g, window);
  const std::size_t cap = max_len.value_or(std::max<std::size_t>(g.node_count(), 2));

  std::vector<std::size_t> truth(pairs.size(), kUnreachable);
  {
    std::vector<std::vector<std::size_t>> dist_cache(g.node_count());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      auto& dist = dist_cache[pairs[i].first];
      if (dist.empty()) dist = bfs_distances(g, pairs[i].first);
      truth[i] = dist[pairs[i].second];
    }
  }

  struct PairOutcome {
    bool exist = false;
    std::optional<double> ratio;
    std::size_t transitions = 0;
    std::size_t nonedge = 0;
  };

  for (const auto& weights : grid) {
    const MixturePredictor predictor(powers, weights);
    std::vector<PairOutcome> outcomes(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
      const auto [s, t] = pairs[i];
      const Generation gen = greedy_generate(predictor, s, t, cap);
      PairOutcome& o = outcomes[i];
      o.transitions = gen.nodes.size() - 1;
      for (std::size_t k = 0; k + 1 < gen.nodes.size(); ++k) {
        if (!g.has_edge(gen.nodes[k], gen.nodes[k + 1])) ++o.nonedge;
      }
      const PredictedPath predicted = to_predicted(gen.nodes);
      o.exist = gen.reached_target && path_valid(g, predicted);
      if (gen.reached_target && truth[i] != kUnreachable) {
        o.ratio = static_cast<double>(o.transitions) / static_cast<double>(truth[i]);
      }
    });

    SweepRow row{weights, 0.0, std::nullopt};
    row.pairs = pairs.size();
    std::size_t hits = 0, ratio_count = 0;
    double ratio_sum = 0.0;
    for (const auto& o : outcomes) {
      if (o.exist) ++hits;
      if (o.ratio) {
        ratio_sum += *o.ratio;
        ++ratio_count;
      }
      row.transitions += o.transitions;
      row.nonedge_transitions += o.nonedge;
    }
    row.acc_exist = pairs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pairs.size());
    if (ratio_count) row.uncompressed_ratio = ratio_sum / static_cast<double>(ratio_count);
    row.nonedge_rate = row.transitions == 0
                           ? 0.0
                           : static_cast<double>(row.nonedge_transitions) / static_cast<double>(row.transitions);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "lambda_vector,acc_exist,uncompressed_ratio,nonedge_rate\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.weights.label() << ',';
    std::snprintf(buf, sizeof buf, "%.10g", r.acc_exist);
    out << buf << ',';
    if (r.uncompressed_ratio) {
      std::snprintf(buf, sizeof buf, "%.10g", *r.uncompressed_ratio);
      out << buf;
    } else {
      out << "nan";
    }
    std::snprintf(buf, sizeof buf, "%.10g", r.nonedge_rate);
    out << ',' << buf << '\n';
  }
}

}  // namespace rgl
