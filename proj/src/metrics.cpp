#include "rgl/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "rgl/errors.hpp"

namespace rgl {

PredictedPath to_predicted(const ReasoningPath& path) { return PredictedPath(path.begin(), path.end()); }

std::string_view to_string(HopClass c) {
  static constexpr std::string_view kNames[] = {"hop0", "hop1", "hop2", "hop3", "hop4", "hop5", "others"};
  return kNames[static_cast<std::size_t>(c)];
}

namespace {

bool in_graph(const DirectedGraph& g, std::int64_t v) {
  return v >= 0 && static_cast<std::uint64_t>(v) < g.node_count();
}

bool edge_of(const DirectedGraph& g, std::int64_t a, std::int64_t b) {
  return in_graph(g, a) && in_graph(g, b) && g.has_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));
}

bool context_edge(const EdgeList& context, std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0 || a > std::numeric_limits<NodeId>::max() || b > std::numeric_limits<NodeId>::max()) {
    return false;
  }
  return std::binary_search(context.begin(), context.end(),
                            Edge{static_cast<NodeId>(a), static_cast<NodeId>(b)});
}

bool runs_between(std::span<const std::int64_t> path, NodeId s, NodeId t) {
  return path.size() >= 2 && path.front() == s && path.back() == t;
}

using PredictionIndex = std::unordered_map<std::uint64_t, const PredictedPath*>;

PredictionIndex index_predictions(std::span<const PredictionRecord> preds) {
  PredictionIndex index;
  index.reserve(preds.size());
  for (const auto& r : preds) {
    if (!index.emplace(r.query_id.value, &r.predicted).second) {
      throw DataError("duplicate prediction for query " + r.query_id.hex());
    }
  }
  return index;
}

const PredictedPath* lookup(const PredictionIndex& index, QueryId id) {
  auto it = index.find(id.value);
  return it == index.end() ? nullptr : it->second;
}

bool exist_hit(const DirectedGraph& g, const QuerySample& s, const PredictedPath* p, const ScoringOptions& o) {
  if (!p || !path_valid(g, *p)) return false;
  return !o.require_endpoints || runs_between(*p, s.source, s.target);
}

bool local_hit(const DirectedGraph& g, const QuerySample& s, const PredictedPath* p) {
  return p && path_valid(g, *p) && condition_satisfied(s, *p);
}

double mean(std::size_t hits, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::size_t truth_edges(const QuerySample& s) { return s.truth_paths.front().size() - 1; }

}  // namespace

bool path_valid(const DirectedGraph& g, std::span<const std::int64_t> path) {
  if (path.size() < 2) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!edge_of(g, path[i], path[i + 1])) return false;
  }
  return true;
}

bool condition_satisfied(const QuerySample& sample, std::span<const std::int64_t> path) {
  if (sample.kind != QueryKind::intrinsic || !sample.context) {
    throw std::invalid_argument("condition_satisfied needs an intrinsic sample");
  }
  if (!runs_between(path, sample.source, sample.target)) return false;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!context_edge(*sample.context, path[i], path[i + 1])) return false;
  }
  return true;
}

double acc_local(const DirectedGraph& g, std::span<const QuerySample> samples,
                 std::span<const PredictionRecord> preds) {
  const auto index = index_predictions(preds);
  std::size_t hits = 0;
  for (const auto& s : samples) {
    if (s.kind != QueryKind::intrinsic) throw std::invalid_argument("acc_local needs intrinsic samples");
    if (local_hit(g, s, lookup(index, s.query_id))) ++hits;
  }
  return mean(hits, samples.size());
}

double acc_exist(const DirectedGraph& g, std::span<const QuerySample> samples,
                 std::span<const PredictionRecord> preds, const ScoringOptions& options) {
  const auto index = index_predictions(preds);
  std::size_t hits = 0;
  for (const auto& s : samples) {
    if (exist_hit(g, s, lookup(index, s.query_id), options)) ++hits;
  }
  return mean(hits, samples.size());
}

namespace {

struct PairQuery {
  NodeId source;
  NodeId target;
  bool reachable;
};

std::unordered_map<std::uint64_t, PairQuery> pair_queries(const DirectedGraph& g) {
  std::unordered_map<std::uint64_t, PairQuery> out;
  out.reserve(g.node_count() * g.node_count());
  for (NodeId s = 0; s < g.node_count(); ++s) {
    const auto dist = bfs_distances(g, s);
    for (NodeId t = 0; t < g.node_count(); ++t) {
      if (s == t) continue;
      out.emplace(make_query_id(QueryKind::extrinsic, nullptr, s, t).value,
                  PairQuery{s, t, dist[t] != kUnreachable});
    }
  }
  return out;
}

GlobalScore score_global(const DirectedGraph& g, std::span<const PredictionRecord> preds,
                         const std::unordered_map<std::uint64_t, PairQuery>& pairs, const ScoringOptions& options) {
  GlobalScore score;
  for (const auto& [id, q] : pairs) {
    if (q.reachable) ++score.universe;
  }
  std::size_t hits = 0;
  std::unordered_map<std::uint64_t, bool> seen;
  for (const auto& r : preds) {
    auto it = pairs.find(r.query_id.value);
    if (it == pairs.end()) continue;
    if (!seen.emplace(r.query_id.value, true).second) {
      throw DataError("duplicate prediction for query " + r.query_id.hex());
    }
    const PairQuery& q = it->second;
    if (!q.reachable) {
      ++score.outside_universe;
      continue;
    }
    ++score.answered;
    const bool ok = path_valid(g, r.predicted) && (!options.require_endpoints || runs_between(r.predicted, q.source, q.target));
    if (ok) ++hits;
  }
  score.accuracy = mean(hits, score.universe);
  return score;
}

}  // namespace

GlobalScore acc_global(const DirectedGraph& g, std::span<const PredictionRecord> preds,
                       const ScoringOptions& options) {
  return score_global(g, preds, pair_queries(g), options);
}

RatioScore uncompressed_ratio(std::span<const QuerySample> samples, std::span<const PredictionRecord> preds) {
  const auto index = index_predictions(preds);
  RatioScore score;
  double sum = 0.0;
  for (const auto& s : samples) {
    const PredictedPath* p = lookup(index, s.query_id);
    if (!p || !runs_between(*p, s.source, s.target)) {
      ++score.unreached;
      continue;
    }
    sum += static_cast<double>(p->size() - 1) / static_cast<double>(truth_edges(s));
    ++score.counted;
  }
  if (score.counted > 0) score.mean = sum / static_cast<double>(score.counted);
  return score;
}

HopClass classify_error(const DirectedGraph& g, std::int64_t previous, std::int64_t predicted) {
  if (previous == predicted) return HopClass::hop0;
  if (!in_graph(g, previous) || !in_graph(g, predicted)) return HopClass::others;
  const auto d = hop_distance(g, static_cast<NodeId>(previous), static_cast<NodeId>(predicted));
  if (!d || *d > 5) return HopClass::others;
  return static_cast<HopClass>(*d);
}

std::optional<TransitionError> first_invalid_transition(const DirectedGraph& g, const QuerySample& sample,
                                                        std::span<const std::int64_t> path) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const bool allowed = sample.context ? context_edge(*sample.context, path[i], path[i + 1])
                                        : edge_of(g, path[i], path[i + 1]);
    if (!allowed) return TransitionError{path[i], path[i + 1]};
  }
  return std::nullopt;
}

ErrorDegreeProfile error_degree_profile(const DegreeProfile& profile, std::span<const TransitionError> errors) {
  ErrorDegreeProfile out;
  const auto n = static_cast<std::int64_t>(profile.zscore.size());
  double sum_pred = 0.0, sum_prev = 0.0;
  std::size_t n_pred = 0, n_prev = 0;
  for (const auto& e : errors) {
    if (e.predicted >= 0 && e.predicted < n) {
      sum_pred += profile.zscore[static_cast<std::size_t>(e.predicted)];
      ++n_pred;
    }
    if (e.previous >= 0 && e.previous < n) {
      sum_prev += profile.zscore[static_cast<std::size_t>(e.previous)];
      ++n_prev;
    }
  }
  if (n_pred) out.mean_z_predicted = sum_pred / static_cast<double>(n_pred);
  if (n_prev) out.mean_z_previous = sum_prev / static_cast<double>(n_prev);
  return out;
}

EvalReport evaluate(const DirectedGraph& g, std::span<const QuerySample> samples,
                    std::span<const PredictionRecord> preds, const ScoringOptions& options) {
  const auto index = index_predictions(preds);
  const auto pairs = pair_queries(g);

  std::unordered_map<std::uint64_t, bool> sample_ids;
  for (const auto& s : samples) sample_ids.emplace(s.query_id.value, true);
  for (const auto& r : preds) {
    if (!sample_ids.contains(r.query_id.value) && !pairs.contains(r.query_id.value)) {
      throw DataError("prediction for unknown query " + r.query_id.hex());
    }
  }

  EvalReport report;
  report.n_queries = samples.size();
  report.n_predictions = preds.size();

  std::size_t exist_hits = 0, local_hits = 0;
  std::vector<TransitionError> errors;
  for (const auto& s : samples) {
    const PredictedPath* p = lookup(index, s.query_id);
    if (!p) ++report.n_missing;
    const bool exist = exist_hit(g, s, p, options);
    if (exist) ++exist_hits;
    bool correct = false;
    if (s.kind == QueryKind::intrinsic) {
      ++report.n_intrinsic;
      correct = local_hit(g, s, p);
      if (correct) ++local_hits;
    } else {
      correct = p && path_valid(g, *p) && runs_between(*p, s.source, s.target);
    }
    if (p && !correct) {
      if (auto e = first_invalid_transition(g, s, *p)) {
        errors.push_back(*e);
        ++report.error_histogram[static_cast<std::size_t>(classify_error(g, e->previous, e->predicted))];
      }
    }
  }
  report.acc_exist = mean(exist_hits, samples.size());
  if (report.n_intrinsic > 0) report.acc_local = mean(local_hits, report.n_intrinsic);
  report.global = score_global(g, preds, pairs, options);
  report.ratio = uncompressed_ratio(samples, preds);
  report.n_errors = errors.size();
  report.degree = error_degree_profile(degree_profile(g), errors);
  return report;
}

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : "undefined"; }

}  // namespace

std::string format_report(const EvalReport& r) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + "=" + v + "\n"; };
  line("n_queries", std::to_string(r.n_queries));
  line("n_intrinsic", std::to_string(r.n_intrinsic));
  line("n_predictions", std::to_string(r.n_predictions));
  line("n_missing", std::to_string(r.n_missing));
  line("acc_local", number(r.acc_local));
  line("acc_exist", number(r.acc_exist));
  line("acc_global", number(r.global.accuracy));
  line("global_universe", std::to_string(r.global.universe));
  line("global_answered", std::to_string(r.global.answered));
  line("global_outside_universe", std::to_string(r.global.outside_universe));
  line("uncompressed_ratio_mean", number(r.ratio.mean));
  line("uncompressed_ratio_counted", std::to_string(r.ratio.counted));
  line("uncompressed_ratio_unreached", std::to_string(r.ratio.unreached));
  line("n_errors", std::to_string(r.n_errors));
  for (std::size_t c = 0; c < kHopClassCount; ++c) {
    line("error_" + std::string(to_string(static_cast<HopClass>(c))), std::to_string(r.error_histogram[c]));
  }
  line("mean_z_predicted", number(r.degree.mean_z_predicted));
  line("mean_z_previous", number(r.degree.mean_z_previous));
  return out;
}

std::vector<std::pair<std::string, std::optional<double>>> report_metrics(const EvalReport& r) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  out.emplace_back("acc_local", r.acc_local);
  out.emplace_back("acc_exist", r.acc_exist);
  out.emplace_back("acc_global", r.global.accuracy);
  out.emplace_back("uncompressed_ratio", r.ratio.mean);
  for (std::size_t c = 0; c < kHopClassCount; ++c) {
    out.emplace_back("error_" + std::string(to_string(static_cast<HopClass>(c))),
                     static_cast<double>(r.error_histogram[c]));
  }
  out.emplace_back("mean_z_predicted", r.degree.mean_z_predicted);
  out.emplace_back("mean_z_previous", r.degree.mean_z_previous);
  return out;
}

}  // namespace rgl
