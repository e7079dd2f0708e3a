#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rgl/corpus.hpp"

namespace rgl {

struct GraphSpec {
  std::string family = "er";  // "er" | "sbm"
  std::size_t n = 10;
  double p = 0.4;             // er
  std::size_t k = 1;          // sbm
  double p_in = 0.1;          // sbm
  double p_out = 0.01;        // sbm
  std::uint64_t seed = 0;
};

struct CorpusSpec {
  std::optional<std::filesystem::path> graph_file;  // default <out>/graph.txt
  std::string kind = "extrinsic";                   // "extrinsic" | "intrinsic"
  std::optional<std::uint64_t> subgraph_cap;
  std::optional<std::size_t> paths_per_pair_cap;
  std::size_t min_paths = 1;
  bool include_empty_context = false;
  std::size_t max_tokens = 128;
  SplitSpec split;
};

struct EvaluateSpec {
  std::optional<std::filesystem::path> graph_file;   // default <out>/graph.txt
  std::optional<std::filesystem::path> dataset;      // default <out>/test.jsonl
  std::optional<std::filesystem::path> predictions;  // file or directory; default <out>/predictions
  bool require_endpoints = true;
};

struct SimulateSpec {
  std::optional<std::filesystem::path> graph_file;  // default <out>/graph.txt
  std::vector<std::vector<double>> lambda_grid{{1.0}};
  /// Empty means every reachable pair.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::optional<std::size_t> max_len;
  std::size_t power_cap = 8;
  bool audit = true;
  std::size_t audit_cap = 10000;
};

/// One declarative run description. Relative paths resolve against the
/// directory holding the config file.
struct RunConfig {
  GraphSpec graph;
  CorpusSpec corpus;
  EvaluateSpec evaluate;
  SimulateSpec simulate;
};

/// Parses JSON config text. Missing keys keep their defaults; unknown keys
/// and ill-typed values throw ConfigError naming the key.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved config (every field explicit), as written next to outputs.
std::string dump_config(const RunConfig& config);

}  // namespace rgl
