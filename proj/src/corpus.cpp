#include "rgl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "rgl/errors.hpp"
#include "rgl/rng.hpp"

namespace rgl {

using ordered_json = nlohmann::ordered_json;

Token Vocabulary::node(NodeId v) const {
  if (v >= node_count_) throw std::out_of_range("node id outside vocabulary");
  return static_cast<Token>(v);
}

std::optional<Marker> Vocabulary::as_marker(Token t) const {
  if (!is_marker(t)) return std::nullopt;
  return static_cast<Marker>(t - node_count_);
}

std::string Vocabulary::render(std::span<const Token> tokens) const {
  static constexpr const char* kNames[] = {"EDGE", "S", "T", "PATH", "END"};
  std::string out;
  for (Token t : tokens) {
    if (!out.empty()) out += ' ';
    if (auto m = as_marker(t)) {
      out += kNames[static_cast<std::size_t>(*m)];
    } else {
      out += std::to_string(t);
    }
  }
  return out;
}

std::string_view to_string(QueryKind kind) {
  return kind == QueryKind::intrinsic ? "intrinsic" : "extrinsic";
}

std::string QueryId::hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) out[static_cast<std::size_t>(i)] = kDigits[(value >> (4 * (15 - i))) & 0xf];
  return out;
}

QueryId QueryId::from_hex(std::string_view text) {
  if (text.size() != 16) throw FormatError("query_id must be 16 hex digits");
  std::uint64_t v = 0;
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') {
      v |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw FormatError("query_id must be lowercase hex");
    }
  }
  return QueryId{v};
}

QueryId make_query_id(QueryKind kind, const EdgeList* context, NodeId source, NodeId target) {
  std::string canonical(to_string(kind));
  canonical += '|';
  if (context) {
    for (std::size_t i = 0; i < context->size(); ++i) {
      if (i) canonical += ',';
      canonical += std::to_string((*context)[i].from) + '-' + std::to_string((*context)[i].to);
    }
  }
  canonical += '|' + std::to_string(source) + '|' + std::to_string(target);

  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return QueryId{h};
}

namespace {

void check_endpoints(NodeId s, NodeId t, const ReasoningPath& path) {
  if (path.size() < 2) throw std::invalid_argument("reasoning path needs at least one edge");
  if (path.front() != s || path.back() != t) {
    throw std::invalid_argument("reasoning path endpoints do not match the query");
  }
}

void append_query(const Vocabulary& vocab, TokenSequence& seq, NodeId s, NodeId t) {
  seq.push_back(vocab.marker(Marker::source));
  seq.push_back(vocab.node(s));
  seq.push_back(vocab.marker(Marker::target));
  seq.push_back(vocab.node(t));
  seq.push_back(vocab.marker(Marker::path));
}

void append_path(const Vocabulary& vocab, TokenSequence& seq, const ReasoningPath& path) {
  for (NodeId v : path) seq.push_back(vocab.node(v));
  seq.push_back(vocab.marker(Marker::end));
}

EdgeList sorted_unique(EdgeList edges) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

TokenSequence serialize_intrinsic(const Vocabulary& vocab, const EdgeList& context, NodeId s, NodeId t,
                                  const ReasoningPath& path) {
  check_endpoints(s, t, path);
  const EdgeList edges = sorted_unique(context);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!std::binary_search(edges.begin(), edges.end(), Edge{path[i], path[i + 1]})) {
      throw std::invalid_argument("path step " + std::to_string(path[i]) + " -> " +
                                  std::to_string(path[i + 1]) + " is not in the context");
    }
  }
  TokenSequence seq;
  seq.reserve(3 * edges.size() + path.size() + 6);
  for (const Edge& e : edges) {
    seq.push_back(vocab.marker(Marker::edge));
    seq.push_back(vocab.node(e.from));
    seq.push_back(vocab.node(e.to));
  }
  append_query(vocab, seq, s, t);
  append_path(vocab, seq, path);
  return seq;
}

TokenSequence serialize_extrinsic(const Vocabulary& vocab, NodeId s, NodeId t, const ReasoningPath& path) {
  check_endpoints(s, t, path);
  TokenSequence seq;
  seq.reserve(path.size() + 6);
  append_query(vocab, seq, s, t);
  append_path(vocab, seq, path);
  return seq;
}

TokenSequence query_prefix(const Vocabulary& vocab, const QuerySample& sample) {
  TokenSequence seq;
  if (sample.context) {
    for (const Edge& e : *sample.context) {
      seq.push_back(vocab.marker(Marker::edge));
      seq.push_back(vocab.node(e.from));
      seq.push_back(vocab.node(e.to));
    }
  }
  append_query(vocab, seq, sample.source, sample.target);
  return seq;
}

std::vector<TokenSequence> training_sequences(const Vocabulary& vocab, const QuerySample& sample) {
  const TokenSequence prefix = query_prefix(vocab, sample);
  std::vector<TokenSequence> out;
  for (const auto& path : sample.truth_paths) {
    TokenSequence seq = prefix;
    append_path(vocab, seq, path);
    out.push_back(std::move(seq));
  }
  return out;
}

QuerySample make_intrinsic_sample(const Vocabulary& vocab, EdgeList context, NodeId s, NodeId t,
                                  std::vector<ReasoningPath> truth_paths) {
  if (truth_paths.empty()) throw std::invalid_argument("sample needs at least one truth path");
  QuerySample sample;
  sample.kind = QueryKind::intrinsic;
  sample.context = sorted_unique(std::move(context));
  sample.source = s;
  sample.target = t;
  for (const auto& p : truth_paths) serialize_intrinsic(vocab, *sample.context, s, t, p);
  sample.tokens = serialize_intrinsic(vocab, *sample.context, s, t, truth_paths.front());
  sample.truth_paths = std::move(truth_paths);
  sample.query_id = make_query_id(QueryKind::intrinsic, &*sample.context, s, t);
  return sample;
}

QuerySample make_extrinsic_sample(const Vocabulary& vocab, NodeId s, NodeId t,
                                  std::vector<ReasoningPath> truth_paths) {
  if (truth_paths.empty()) throw std::invalid_argument("sample needs at least one truth path");
  QuerySample sample;
  sample.kind = QueryKind::extrinsic;
  sample.source = s;
  sample.target = t;
  for (const auto& p : truth_paths) check_endpoints(s, t, p);
  sample.tokens = serialize_extrinsic(vocab, s, t, truth_paths.front());
  sample.truth_paths = std::move(truth_paths);
  sample.query_id = make_query_id(QueryKind::extrinsic, nullptr, s, t);
  return sample;
}

// ---------------------------------------------------------------------------

std::string_view to_string(LeakageFilter filter) {
  switch (filter) {
    case LeakageFilter::none: return "none";
    case LeakageFilter::contiguous: return "contiguous";
    case LeakageFilter::subsequence: return "subsequence";
  }
  return "contiguous";
}

std::optional<LeakageFilter> parse_leakage_filter(std::string_view text) {
  if (text == "none") return LeakageFilter::none;
  if (text == "contiguous") return LeakageFilter::contiguous;
  if (text == "subsequence") return LeakageFilter::subsequence;
  return std::nullopt;
}

bool is_contiguous_subsequence(std::span<const NodeId> needle, std::span<const NodeId> haystack) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

bool is_subsequence(std::span<const NodeId> needle, std::span<const NodeId> haystack) {
  std::size_t i = 0;
  for (NodeId v : haystack) {
    if (i < needle.size() && needle[i] == v) ++i;
  }
  return i == needle.size();
}

namespace {

struct PathHash {
  std::size_t operator()(const ReasoningPath& p) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (NodeId v : p) {
      h ^= v;
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

// floor/ceil that ignore representation noise such as 0.9 * 10 = 9.000...02
std::size_t stable_floor(double x) { return static_cast<std::size_t>(std::floor(x + 1e-9)); }
std::size_t stable_ceil(double x) { return static_cast<std::size_t>(std::ceil(x - 1e-9)); }

class LeakageIndex {
 public:
  LeakageIndex(LeakageFilter filter, const std::vector<QuerySample>& train) : filter_(filter) {
    for (const auto& sample : train) {
      for (const auto& path : sample.truth_paths) {
        if (filter_ == LeakageFilter::contiguous) {
          for (std::size_t i = 0; i < path.size(); ++i) {
            for (std::size_t j = i + 1; j <= path.size(); ++j) {
              windows_.emplace(path.begin() + static_cast<std::ptrdiff_t>(i),
                               path.begin() + static_cast<std::ptrdiff_t>(j));
            }
          }
        } else if (filter_ == LeakageFilter::subsequence) {
          paths_.push_back(&path);
        }
      }
    }
  }

  bool leaks(const ReasoningPath& path) const {
    switch (filter_) {
      case LeakageFilter::none: return false;
      case LeakageFilter::contiguous: return windows_.contains(path);
      case LeakageFilter::subsequence:
        return std::any_of(paths_.begin(), paths_.end(),
                           [&](const ReasoningPath* train) { return is_subsequence(path, *train); });
    }
    return false;
  }

 private:
  LeakageFilter filter_;
  std::unordered_set<ReasoningPath, PathHash> windows_;
  std::vector<const ReasoningPath*> paths_;
};

}  // namespace

SplitResult build_split(std::vector<QuerySample> samples, const SplitSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("build_split: no samples");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
    throw std::invalid_argument("train_fraction must lie in (0, 1]");
  }
  if (!(spec.train_ratio > 0.0 && spec.train_ratio <= 1.0)) {
    throw std::invalid_argument("train_ratio must lie in (0, 1]");
  }

  Rng rng(spec.seed);
  rng.shuffle(std::span<QuerySample>(samples));

  const std::size_t n_train =
      std::min(samples.size(), stable_floor(spec.train_fraction * static_cast<double>(samples.size())));
  SplitResult result;
  result.train.assign(std::make_move_iterator(samples.begin()),
                      std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)));
  std::vector<QuerySample> candidates(std::make_move_iterator(samples.begin() + static_cast<std::ptrdiff_t>(n_train)),
                                      std::make_move_iterator(samples.end()));
  result.test_before_filter = candidates.size();

  const LeakageIndex index(spec.filter, result.train);
  for (auto& sample : candidates) {
    std::vector<ReasoningPath> kept;
    for (const auto& path : sample.truth_paths) {
      if (index.leaks(path)) {
        ++result.leaked_paths_pruned;
      } else {
        kept.push_back(path);
      }
    }
    if (kept.empty()) {
      ++result.leaked_samples_removed;
      continue;
    }
    if (kept.size() != sample.truth_paths.size() || kept.front() != sample.truth_paths.front()) {
      // Re-derive the training sequence from the surviving first path.
      const std::size_t prefix_len = sample.tokens.size() - sample.truth_paths.front().size() - 1;
      TokenSequence tokens(sample.tokens.begin(), sample.tokens.begin() + static_cast<std::ptrdiff_t>(prefix_len));
      for (NodeId v : kept.front()) tokens.push_back(static_cast<Token>(v));
      tokens.push_back(sample.tokens.back());
      sample.tokens = std::move(tokens);
    }
    sample.truth_paths = std::move(kept);
    result.test.push_back(std::move(sample));
  }
  result.test_empty = result.test.empty();

  result.train_before_ratio = result.train.size();
  const std::size_t keep = stable_ceil(spec.train_ratio * static_cast<double>(result.train.size()));
  if (keep < result.train.size()) result.train.resize(keep);
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t longest_sequence(const QuerySample& sample) {
  std::size_t longest = 0;
  const std::size_t prefix = sample.tokens.size() - sample.truth_paths.front().size() - 1;
  for (const auto& p : sample.truth_paths) longest = std::max(longest, prefix + p.size() + 1);
  return longest;
}

}  // namespace

std::vector<QuerySample> build_extrinsic_corpus(const DirectedGraph& g, const CorpusOptions& options,
                                                CorpusStats* stats) {
  const Vocabulary vocab(g.node_count());
  CorpusStats local;
  std::vector<QuerySample> samples;
  const auto universe = extrinsic_universe(g, options.paths_per_pair_cap);
  for (std::size_t i = 0; i < universe.size();) {
    std::size_t j = i;
    std::vector<ReasoningPath> paths;
    while (j < universe.size() && universe[j].source == universe[i].source &&
           universe[j].target == universe[i].target) {
      paths.push_back(universe[j].path);
      ++j;
    }
    ++local.queries;
    if (!options.filter.accepts(paths.size())) {
      ++local.dropped_path_filter;
    } else {
      QuerySample sample = make_extrinsic_sample(vocab, universe[i].source, universe[i].target, std::move(paths));
      if (longest_sequence(sample) > options.max_tokens) {
        ++local.dropped_token_cap;
      } else {
        samples.push_back(std::move(sample));
      }
    }
    i = j;
  }
  if (stats) *stats = local;
  return samples;
}

std::vector<QuerySample> build_intrinsic_corpus(const DirectedGraph& g, const CorpusOptions& options,
                                                CorpusStats* stats) {
  const Vocabulary vocab(g.node_count());
  CorpusStats local;
  std::vector<QuerySample> samples;
  std::unordered_map<std::uint64_t, std::size_t> by_id;

  SubgraphEnumerator contexts(g, options.include_empty_context);
  while (!options.subgraph_cap || local.contexts_consumed < *options.subgraph_cap) {
    auto ctx = contexts.next();
    if (!ctx) break;
    ++local.contexts_consumed;
    if (ctx->edges.empty()) continue;

    const DirectedGraph sub = context_graph(g, *ctx);
    for (NodeId s : ctx->nodes) {
      const auto dist = bfs_distances(sub, s);
      for (NodeId t : ctx->nodes) {
        if (t == s || dist[t] == kUnreachable) continue;
        ++local.queries;
        auto paths = enumerate_shortest_paths(sub, s, t, options.paths_per_pair_cap);
        if (!options.filter.accepts(paths.size())) {
          ++local.dropped_path_filter;
          continue;
        }
        QuerySample sample = make_intrinsic_sample(vocab, ctx->edges, s, t, std::move(paths));
        if (longest_sequence(sample) > options.max_tokens) {
          ++local.dropped_token_cap;
          continue;
        }
        auto [it, inserted] = by_id.emplace(sample.query_id.value, samples.size());
        if (!inserted) {
          const QuerySample& prior = samples[it->second];
          if (prior.context != sample.context || prior.source != s || prior.target != t) {
            throw DataError("query_id collision on " + sample.query_id.hex());
          }
          // Same edge list reached through a different node subset.
          ++local.duplicate_queries;
          continue;
        }
        samples.push_back(std::move(sample));
      }
    }
  }
  if (stats) *stats = local;
  return samples;
}

// ---------------------------------------------------------------------------
// Wire formats

namespace {

ordered_json to_json(const QuerySample& s) {
  ordered_json j;
  j["query_id"] = s.query_id.hex();
  j["kind"] = to_string(s.kind);
  if (s.context) {
    ordered_json ctx = ordered_json::array();
    for (const Edge& e : *s.context) ctx.push_back({e.from, e.to});
    j["context"] = std::move(ctx);
  } else {
    j["context"] = nullptr;
  }
  j["source"] = s.source;
  j["target"] = s.target;
  j["truth_paths"] = s.truth_paths;
  j["tokens"] = s.tokens;
  return j;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw FormatError("line " + std::to_string(line_no) + ": " + what);
}

void expect_header(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != kFormatHeader) {
    throw FormatError("missing header '" + std::string(kFormatHeader) + "'");
  }
}

void check_keys(const ordered_json& j, std::initializer_list<std::string_view> keys, std::size_t line_no) {
  if (!j.is_object()) fail(line_no, "record is not an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) fail(line_no, "unknown field '" + it.key() + "'");
  }
  for (std::string_view k : keys) {
    if (!j.contains(std::string(k))) fail(line_no, "missing field '" + std::string(k) + "'");
  }
}

NodeId as_node(const ordered_json& v, std::size_t line_no) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<NodeId>::max()) {
    fail(line_no, "expected a node id");
  }
  return v.get<NodeId>();
}

ReasoningPath as_path(const ordered_json& v, std::size_t line_no) {
  if (!v.is_array()) fail(line_no, "expected a node list");
  ReasoningPath p;
  for (const auto& x : v) p.push_back(as_node(x, line_no));
  return p;
}

QuerySample from_json(const ordered_json& j, std::size_t line_no, std::optional<std::size_t>& node_count) {
  check_keys(j, {"query_id", "kind", "context", "source", "target", "truth_paths", "tokens"}, line_no);
  QuerySample s;
  if (!j["query_id"].is_string()) fail(line_no, "query_id must be a string");
  s.query_id = QueryId::from_hex(j["query_id"].get<std::string>());
  const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
  if (kind == "intrinsic") {
    s.kind = QueryKind::intrinsic;
  } else if (kind == "extrinsic") {
    s.kind = QueryKind::extrinsic;
  } else {
    fail(line_no, "kind must be 'intrinsic' or 'extrinsic'");
  }
  if (s.kind == QueryKind::intrinsic) {
    if (!j["context"].is_array()) fail(line_no, "intrinsic record needs a context edge list");
    EdgeList ctx;
    for (const auto& e : j["context"]) {
      if (!e.is_array() || e.size() != 2) fail(line_no, "context entries must be [u, v] pairs");
      ctx.push_back({as_node(e[0], line_no), as_node(e[1], line_no)});
    }
    if (!std::is_sorted(ctx.begin(), ctx.end()) || std::adjacent_find(ctx.begin(), ctx.end()) != ctx.end()) {
      fail(line_no, "context must be sorted and duplicate-free");
    }
    s.context = std::move(ctx);
  } else if (!j["context"].is_null()) {
    fail(line_no, "extrinsic record must have a null context");
  }
  s.source = as_node(j["source"], line_no);
  s.target = as_node(j["target"], line_no);
  if (!j["truth_paths"].is_array() || j["truth_paths"].empty()) fail(line_no, "truth_paths must be non-empty");
  for (const auto& p : j["truth_paths"]) s.truth_paths.push_back(as_path(p, line_no));
  if (!j["tokens"].is_array() || j["tokens"].empty()) fail(line_no, "tokens must be a non-empty list");
  for (const auto& t : j["tokens"]) {
    if (!t.is_number_unsigned()) fail(line_no, "tokens must be unsigned integers");
    s.tokens.push_back(t.get<Token>());
  }

  // The first token is EDGE (intrinsic) or S (extrinsic), which pins N.
  const std::size_t first_marker = s.kind == QueryKind::intrinsic ? 0 : 1;
  if (s.tokens.front() < first_marker) fail(line_no, "cannot infer vocabulary size");
  const std::size_t n = s.tokens.front() - first_marker;
  if (node_count && *node_count != n) fail(line_no, "vocabulary size differs from earlier records");
  node_count = n;

  if (s.query_id != make_query_id(s.kind, s.context ? &*s.context : nullptr, s.source, s.target)) {
    fail(line_no, "query_id does not match record contents");
  }
  const Vocabulary vocab(n);
  try {
    const std::size_t length = s.truth_paths.front().size();
    for (const auto& p : s.truth_paths) {
      if (p.size() != length) fail(line_no, "truth paths differ in length");
      if (s.kind == QueryKind::intrinsic) {
        serialize_intrinsic(vocab, *s.context, s.source, s.target, p);
      } else {
        serialize_extrinsic(vocab, s.source, s.target, p);
      }
    }
    const TokenSequence expected =
        s.kind == QueryKind::intrinsic
            ? serialize_intrinsic(vocab, *s.context, s.source, s.target, s.truth_paths.front())
            : serialize_extrinsic(vocab, s.source, s.target, s.truth_paths.front());
    if (expected != s.tokens) fail(line_no, "tokens do not match the first truth path");
  } catch (const std::invalid_argument& e) {
    fail(line_no, e.what());
  } catch (const std::out_of_range& e) {
    fail(line_no, e.what());
  }
  return s;
}

template <class Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  expect_header(in);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(line_no, std::string("invalid JSON: ") + e.what());
    }
    fn(j, line_no);
  }
}

}  // namespace

std::size_t emit_dataset(std::ostream& out, std::span<const QuerySample> samples) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto& s : samples) {
    if (!seen.insert(s.query_id.value).second) throw DataError("duplicate query_id " + s.query_id.hex());
  }
  out << kFormatHeader << '\n';
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
  if (!out) throw DataError("dataset write failed");
  return samples.size();
}

std::size_t emit_dataset(const std::filesystem::path& destination, std::span<const QuerySample> samples) {
  std::ostringstream buffer;
  const std::size_t count = emit_dataset(buffer, samples);
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw DataError("cannot open " + destination.string() + " for writing");
  out << buffer.str();
  if (!out) throw DataError("write failed: " + destination.string());
  return count;
}

std::vector<QuerySample> parse_dataset(std::istream& in) {
  std::vector<QuerySample> samples;
  std::optional<std::size_t> node_count;
  std::unordered_set<std::uint64_t> seen;
  for_each_record(in, [&](const ordered_json& j, std::size_t line_no) {
    QuerySample s = from_json(j, line_no, node_count);
    if (!seen.insert(s.query_id.value).second) fail(line_no, "duplicate query_id " + s.query_id.hex());
    samples.push_back(std::move(s));
  });
  return samples;
}

std::vector<QuerySample> read_dataset(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + source.string());
  try {
    return parse_dataset(in);
  } catch (const FormatError& e) {
    throw FormatError(source.string() + ": " + e.what());
  }
}

std::size_t emit_predictions(std::ostream& out, std::span<const PredictionRecord> records) {
  out << kFormatHeader << '\n';
  for (const auto& r : records) {
    ordered_json j;
    j["query_id"] = r.query_id.hex();
    j["predicted"] = r.predicted;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("predictions write failed");
  return records.size();
}

std::size_t emit_predictions(const std::filesystem::path& destination,
                             std::span<const PredictionRecord> records) {
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw DataError("cannot open " + destination.string() + " for writing");
  return emit_predictions(out, records);
}

std::vector<PredictionRecord> parse_predictions(std::istream& in) {
  std::vector<PredictionRecord> records;
  for_each_record(in, [&](const ordered_json& j, std::size_t line_no) {
    check_keys(j, {"query_id", "predicted"}, line_no);
    if (!j["query_id"].is_string()) fail(line_no, "query_id must be a string");
    PredictionRecord r;
    r.query_id = QueryId::from_hex(j["query_id"].get<std::string>());
    if (!j["predicted"].is_array()) fail(line_no, "predicted must be a list");
    for (const auto& v : j["predicted"]) {
      if (!v.is_number_integer()) fail(line_no, "predicted entries must be integers");
      r.predicted.push_back(v.get<std::int64_t>());
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw DataError("cannot open predictions " + source.string());
  try {
    return parse_predictions(in);
  } catch (const FormatError& e) {
    throw FormatError(source.string() + ": " + e.what());
  }
}

}  // namespace rgl
