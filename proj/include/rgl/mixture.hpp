#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rgl/enumeration.hpp"
#include "rgl/graph.hpp"

namespace rgl {

using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major N x N matrix.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  explicit TransitionMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double at(NodeId x, NodeId y) const { return data_[static_cast<std::size_t>(x) * n_ + y]; }
  double& at(NodeId x, NodeId y) { return data_[static_cast<std::size_t>(x) * n_ + y]; }
  std::span<const double> row(NodeId x) const { return {data_.data() + static_cast<std::size_t>(x) * n_, n_}; }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// One-step random walk: T[x][y] = 1/outdeg(x) for each edge x -> y.
/// Sink rows stay zero.
TransitionMatrix build_transition(const DirectedGraph& g);

/// T^1..T^K. Each power is the previous one times the sparse T, accumulated
/// in edge order, so results are reproducible bit-for-bit.
class TransitionPowers {
 public:
  TransitionPowers(const DirectedGraph& g, std::size_t window);

  std::size_t window() const { return powers_.size(); }
  std::size_t node_count() const { return powers_.front().size(); }
  /// i in [1, K].
  const TransitionMatrix& power(std::size_t i) const { return powers_.at(i - 1); }

 private:
  std::vector<TransitionMatrix> powers_;
};

/// lambda_1..lambda_K >= 0, normalized to sum 1. The raw values are kept
/// because the shortcut conditions compare ratios, which normalization
/// leaves unchanged.
class MixtureWeights {
 public:
  /// Throws std::invalid_argument for an empty vector, negative or
  /// non-finite entries, or an all-zero vector.
  explicit MixtureWeights(std::vector<double> raw);

  std::size_t window() const { return raw_.size(); }
  /// 1-based, normalized.
  double lambda(std::size_t i) const { return normalized_.at(i - 1); }
  /// 1-based, as given.
  double raw(std::size_t i) const { return raw_.at(i - 1); }
  std::span<const double> normalized() const { return normalized_; }
  std::span<const double> raw_values() const { return raw_; }

  /// "0.4;0.6" (normalized values).
  std::string label() const;

 private:
  std::vector<double> raw_;
  std::vector<double> normalized_;
};

/// sum_i lambda_i (T^i)[x][y]. Requires weights.window() <= powers.window().
double mixture_prob(const TransitionPowers& powers, const MixtureWeights& weights, NodeId x, NodeId y);

/// Powers plus weights; P(y | x) = sum_i lambda_i (T^i)[x][y].
class MixturePredictor {
 public:
  MixturePredictor(const DirectedGraph& g, MixtureWeights weights);
  MixturePredictor(std::shared_ptr<const TransitionPowers> powers, MixtureWeights weights);

  const TransitionPowers& powers() const { return *powers_; }
  const MixtureWeights& weights() const { return weights_; }
  std::size_t node_count() const { return powers_->node_count(); }

  double prob(NodeId x, NodeId y) const { return mixture_prob(*powers_, weights_, x, y); }
  std::vector<double> distribution(NodeId x) const;

  /// Same powers, different weights.
  MixturePredictor with_weights(MixtureWeights weights) const { return {powers_, std::move(weights)}; }

 private:
  std::shared_ptr<const TransitionPowers> powers_;
  MixtureWeights weights_;
};

double mixture_prob(const MixturePredictor& m, NodeId x, NodeId y);

// ---------------------------------------------------------------------------
// Shortcut conditions
//
// The weight-independent part (premises and the path-mass sum) is computed
// once per (v, m, u) by analyze_*; decide_shortcut then evaluates a weight
// vector against it. shortcut_condition_* do both in one call.

struct ShortcutAnalysis {
  NodeId v = 0, m = 0, u = 0;
  std::size_t hops = 2;  // d
  bool edge_vm = false;
  bool edge_vu = false;
  bool hops_match = false;        // dist(v, u) == d and m lies on a shortest v -> u path
  bool no_return_to_m = false;    // (T^i)[v][m] == 0 for 2 <= i <= K
  bool premises_hold = false;
  /// sum over d-hop v -> u paths of prod over interior x of 1/outdeg(x),
  /// exact. Zero when no such path exists.
  Rational path_mass = 0;
  double path_mass_approx = 0.0;
};

/// Two-hop case (K = 2, d = 2): edge v -> m, edge m -> u, no edge v -> u,
/// (T^2)[v][m] = 0. The mass sums 1/outdeg(m') over intermediates m'.
ShortcutAnalysis analyze_shortcut_2hop(const DirectedGraph& g, const TransitionPowers& powers, NodeId v, NodeId m,
                                       NodeId u);

/// General case, 2 <= d <= K: dist(v, u) = d, edge v -> m with
/// dist(m, u) = d - 1, and (T^i)[v][m] = 0 for 2 <= i <= K. The mass is
/// summed over the enumerated shortest paths. Throws std::invalid_argument
/// when d is outside [2, K].
ShortcutAnalysis analyze_shortcut_general(const DirectedGraph& g, const TransitionPowers& powers, NodeId v, NodeId m,
                                          NodeId u, std::size_t d);

struct ShortcutDecision {
  bool premises_hold = false;
  /// lambda_d / lambda_1 > 1 / path_mass, decided exactly.
  bool condition_holds = false;
  /// P(u | v) > P(m | v) under the mixture.
  bool argmax_flips = false;
  /// lambda_1 = 0 with a finite threshold: the condition holds trivially.
  bool lambda1_zero = false;
  double ratio = 0.0;      // lambda_d / lambda_1 (inf when lambda_1 = 0)
  double threshold = 0.0;  // 1 / path_mass (inf when the mass is 0)
  double p_skip = 0.0;     // P(u | v)
  double p_neighbor = 0.0; // P(m | v)
};

ShortcutDecision decide_shortcut(const ShortcutAnalysis& a, const TransitionPowers& powers,
                                 const MixtureWeights& weights);

/// Requires weights.window() == 2.
ShortcutDecision shortcut_condition_2hop(const DirectedGraph& g, NodeId v, NodeId m, NodeId u,
                                         const MixtureWeights& weights);
/// Uses K = weights.window().
ShortcutDecision shortcut_condition_general(const DirectedGraph& g, NodeId v, NodeId m, NodeId u, std::size_t d,
                                            const MixtureWeights& weights);

/// One JSON object per decision, for the audit log.
std::string to_json(const ShortcutAnalysis& a, const ShortcutDecision& d, const MixtureWeights& w);

// ---------------------------------------------------------------------------
// Generation

struct Generation {
  std::vector<NodeId> nodes;
  bool reached_target = false;
  bool stopped_at_sink = false;
};

/// Relative gap below which two greedy candidates are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

/// Appends argmax_y P(y | current), lowest id on ties, until t is reached,
/// the sequence holds max_len nodes, or the current row is all zero.
/// Throws std::invalid_argument when max_len == 0.
Generation greedy_generate(const MixturePredictor& m, NodeId s, NodeId t, std::size_t max_len);

/// Samples from P(. | current)^(1/temperature), renormalized.
Generation sample_generate(const MixturePredictor& m, NodeId s, NodeId t, std::size_t max_len, double temperature,
                           std::uint64_t seed);

/// True iff `path` is a valid path of g and each suffix v_k..v_L has length
/// dist(v_k, v_L).
bool verify_suffix_optimality(const DirectedGraph& g, const ReasoningPath& path);

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
  MixtureWeights weights;
  double acc_exist = 0.0;
  std::optional<double> uncompressed_ratio;  // over generations reaching t
  double nonedge_rate = 0.0;                 // non-edge transitions / transitions
  std::size_t pairs = 0;
  std::size_t transitions = 0;
  std::size_t nonedge_transitions = 0;
};

/// Greedy-generates every pair under each weight vector and scores the
/// results. max_len defaults to the node count.
std::vector<SweepRow> compression_sweep(const DirectedGraph& g, std::span<const MixtureWeights> grid,
                                        std::span<const std::pair<NodeId, NodeId>> pairs,
                                        std::optional<std::size_t> max_len = std::nullopt);

/// Header "lambda_vector,acc_exist,uncompressed_ratio,nonedge_rate".
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace rgl
