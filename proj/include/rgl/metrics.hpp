#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rgl/corpus.hpp"
#include "rgl/graph.hpp"

namespace rgl {

using PredictedPath = std::vector<std::int64_t>;

PredictedPath to_predicted(const ReasoningPath& path);

/// Hop distance from the previous node to the wrongly predicted node.
enum class HopClass : std::uint8_t { hop0, hop1, hop2, hop3, hop4, hop5, others };

inline constexpr std::size_t kHopClassCount = 7;
std::string_view to_string(HopClass c);

struct ScoringOptions {
  /// Exist and Global accuracy also require the path to start at s and end
  /// at t. Disable to score bare edge validity.
  bool require_endpoints = true;
};

/// Length >= 2 and every consecutive pair is an edge of g.
bool path_valid(const DirectedGraph& g, std::span<const std::int64_t> path);

/// Starts at the source, ends at the target, and every step is a context
/// edge. Throws std::invalid_argument for extrinsic samples.
bool condition_satisfied(const QuerySample& sample, std::span<const std::int64_t> path);

// Accuracies: mean over samples, missing predictions score 0, duplicate
// predictions for one query throw DataError. Predictions for unknown ids
// are ignored here; evaluate() rejects them.
double acc_local(const DirectedGraph& g, std::span<const QuerySample> samples,
                 std::span<const PredictionRecord> preds);
double acc_exist(const DirectedGraph& g, std::span<const QuerySample> samples,
                 std::span<const PredictionRecord> preds, const ScoringOptions& options = {});

struct GlobalScore {
  double accuracy = 0.0;
  std::size_t universe = 0;           // |V_reach|
  std::size_t answered = 0;           // predictions matched to V_reach pairs
  std::size_t outside_universe = 0;   // predictions for unreachable pairs (ignored)

  friend bool operator==(const GlobalScore&, const GlobalScore&) = default;
};

/// Mean path validity over every reachable pair, using predictions keyed by
/// the context-free query id of each (s, t).
GlobalScore acc_global(const DirectedGraph& g, std::span<const PredictionRecord> preds,
                       const ScoringOptions& options = {});

struct RatioScore {
  std::optional<double> mean;  // unset when no prediction reaches its target
  std::size_t counted = 0;
  std::size_t unreached = 0;   // excluded: missing, empty, or wrong endpoints

  friend bool operator==(const RatioScore&, const RatioScore&) = default;
};

/// Predicted edge count / shortest truth edge count, averaged over
/// predictions that run from the source to the target.
RatioScore uncompressed_ratio(std::span<const QuerySample> samples, std::span<const PredictionRecord> preds);

HopClass classify_error(const DirectedGraph& g, std::int64_t previous, std::int64_t predicted);

struct TransitionError {
  std::int64_t previous = 0;
  std::int64_t predicted = 0;

  friend bool operator==(const TransitionError&, const TransitionError&) = default;
};

/// First step that is not allowed for the sample: a context edge for
/// intrinsic samples, an underlying edge for extrinsic ones.
std::optional<TransitionError> first_invalid_transition(const DirectedGraph& g, const QuerySample& sample,
                                                        std::span<const std::int64_t> path);

struct ErrorDegreeProfile {
  std::optional<double> mean_z_predicted;
  std::optional<double> mean_z_previous;

  friend bool operator==(const ErrorDegreeProfile&, const ErrorDegreeProfile&) = default;
};

/// Means of out-degree z-scores over the error list; ids outside the graph
/// are skipped. Both unset for an empty list.
ErrorDegreeProfile error_degree_profile(const DegreeProfile& profile, std::span<const TransitionError> errors);

struct EvalReport {
  std::size_t n_queries = 0;
  std::size_t n_intrinsic = 0;
  std::size_t n_predictions = 0;
  std::size_t n_missing = 0;
  std::optional<double> acc_local;  // unset without intrinsic samples
  double acc_exist = 0.0;
  GlobalScore global;
  RatioScore ratio;
  std::array<std::size_t, kHopClassCount> error_histogram{};
  std::size_t n_errors = 0;  // sum of error_histogram
  ErrorDegreeProfile degree;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Scores one prediction set. Throws DataError for duplicate predictions and
/// for ids that match neither a sample nor a context-free pair query.
EvalReport evaluate(const DirectedGraph& g, std::span<const QuerySample> samples,
                    std::span<const PredictionRecord> preds, const ScoringOptions& options = {});

/// key=value lines.
std::string format_report(const EvalReport& report);

/// Fixed (metric, value) list for the per-checkpoint CSV; unset values are
/// undefined for this prediction set.
std::vector<std::pair<std::string, std::optional<double>>> report_metrics(const EvalReport& report);

}  // namespace rgl
