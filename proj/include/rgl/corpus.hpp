#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rgl/enumeration.hpp"
#include "rgl/graph.hpp"

namespace rgl {

using Token = std::uint32_t;
using TokenSequence = std::vector<Token>;

enum class Marker : std::uint8_t { edge = 0, source = 1, target = 2, path = 3, end = 4 };

/// Node tokens occupy ids [0, N); markers EDGE, S, T, PATH, END follow at
/// N..N+4.
class Vocabulary {
 public:
  explicit Vocabulary(std::size_t node_count) : node_count_(node_count) {}

  std::size_t node_count() const { return node_count_; }
  std::size_t size() const { return node_count_ + 5; }

  Token node(NodeId v) const;
  Token marker(Marker m) const { return static_cast<Token>(node_count_ + static_cast<std::size_t>(m)); }
  bool is_marker(Token t) const { return t >= node_count_ && t < size(); }
  std::optional<Marker> as_marker(Token t) const;

  /// Space-separated rendering, e.g. "S 33 T 62 PATH 33 381 76 62 END".
  std::string render(std::span<const Token> tokens) const;

 private:
  std::size_t node_count_;
};

enum class QueryKind { intrinsic, extrinsic };

std::string_view to_string(QueryKind kind);

/// Stable 64-bit query identity: FNV-1a over the canonical text
/// "<kind>|<u>-<v>,...|<s>|<t>" (context omitted for extrinsic queries).
struct QueryId {
  std::uint64_t value = 0;

  std::string hex() const;  // 16 lowercase hex digits
  static QueryId from_hex(std::string_view text);

  friend auto operator<=>(const QueryId&, const QueryId&) = default;
};

QueryId make_query_id(QueryKind kind, const EdgeList* context, NodeId source, NodeId target);

struct QuerySample {
  QueryKind kind = QueryKind::extrinsic;
  std::optional<EdgeList> context;  // sorted; present iff intrinsic
  NodeId source = 0;
  NodeId target = 0;
  std::vector<ReasoningPath> truth_paths;  // non-empty
  QueryId query_id;
  /// Training sequence for truth_paths.front().
  TokenSequence tokens;

  friend bool operator==(const QuerySample&, const QuerySample&) = default;
};

/// EDGE u v ... S s T t PATH v0 .. vL END, context edges in sorted order.
/// Throws std::invalid_argument when the path is empty, leaves the context,
/// or does not run from s to t.
TokenSequence serialize_intrinsic(const Vocabulary& vocab, const EdgeList& context, NodeId s, NodeId t,
                                  const ReasoningPath& path);

/// S s T t PATH v0 .. vL END.
TokenSequence serialize_extrinsic(const Vocabulary& vocab, NodeId s, NodeId t, const ReasoningPath& path);

/// Everything up to and including the PATH marker.
TokenSequence query_prefix(const Vocabulary& vocab, const QuerySample& sample);

/// One training sequence per truth path (prefix ++ path ++ END).
std::vector<TokenSequence> training_sequences(const Vocabulary& vocab, const QuerySample& sample);

QuerySample make_intrinsic_sample(const Vocabulary& vocab, EdgeList context, NodeId s, NodeId t,
                                  std::vector<ReasoningPath> truth_paths);
QuerySample make_extrinsic_sample(const Vocabulary& vocab, NodeId s, NodeId t,
                                  std::vector<ReasoningPath> truth_paths);

// ---------------------------------------------------------------------------
// Splitting

enum class LeakageFilter {
  none,
  contiguous,   // test path appears as a contiguous run inside a train path
  subsequence,  // test path appears as a (not necessarily contiguous) subsequence
};

std::string_view to_string(LeakageFilter filter);
std::optional<LeakageFilter> parse_leakage_filter(std::string_view text);

bool is_contiguous_subsequence(std::span<const NodeId> needle, std::span<const NodeId> haystack);
bool is_subsequence(std::span<const NodeId> needle, std::span<const NodeId> haystack);

struct SplitSpec {
  double train_fraction = 0.9;
  double train_ratio = 1.0;
  std::uint64_t seed = 0;
  LeakageFilter filter = LeakageFilter::contiguous;
};

struct SplitResult {
  std::vector<QuerySample> train;
  std::vector<QuerySample> test;
  std::size_t test_before_filter = 0;
  std::size_t leaked_samples_removed = 0;
  std::size_t leaked_paths_pruned = 0;
  std::size_t train_before_ratio = 0;
  bool test_empty = false;
};

/// Deterministic shuffle under spec.seed, then floor(train_fraction * n)
/// samples to train. Test truth paths that leak into a train truth path are
/// pruned and samples left without truth paths are dropped. Train is then
/// truncated to ceil(train_ratio * |train|).
SplitResult build_split(std::vector<QuerySample> samples, const SplitSpec& spec);

// ---------------------------------------------------------------------------
// Corpus construction

struct CorpusOptions {
  std::optional<std::size_t> paths_per_pair_cap;
  std::optional<std::uint64_t> subgraph_cap;  // contexts consumed (intrinsic)
  bool include_empty_context = false;
  PathCountFilter filter;
  std::size_t max_tokens = 128;
};

struct CorpusStats {
  std::uint64_t contexts_consumed = 0;
  std::size_t queries = 0;
  std::size_t dropped_token_cap = 0;
  std::size_t dropped_path_filter = 0;
  std::size_t duplicate_queries = 0;
};

std::vector<QuerySample> build_extrinsic_corpus(const DirectedGraph& g, const CorpusOptions& options,
                                                CorpusStats* stats = nullptr);
std::vector<QuerySample> build_intrinsic_corpus(const DirectedGraph& g, const CorpusOptions& options,
                                                CorpusStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Wire formats: header line, then one JSON object per line.

inline constexpr std::string_view kFormatHeader = "format reason-graph-lab v1";

/// Throws DataError on duplicate query ids or I/O failure.
std::size_t emit_dataset(std::ostream& out, std::span<const QuerySample> samples);
std::size_t emit_dataset(const std::filesystem::path& destination, std::span<const QuerySample> samples);

/// Validates ids, token sequences and truth paths; throws FormatError.
std::vector<QuerySample> parse_dataset(std::istream& in);
std::vector<QuerySample> read_dataset(const std::filesystem::path& source);

struct PredictionRecord {
  QueryId query_id;
  std::vector<std::int64_t> predicted;  // markers stripped; may be malformed

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

std::size_t emit_predictions(std::ostream& out, std::span<const PredictionRecord> records);
std::size_t emit_predictions(const std::filesystem::path& destination,
                             std::span<const PredictionRecord> records);
std::vector<PredictionRecord> parse_predictions(std::istream& in);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& source);

}  // namespace rgl
