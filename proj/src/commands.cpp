#include "rgl/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgl/corpus.hpp"
#include "rgl/errors.hpp"
#include "rgl/graph.hpp"
#include "rgl/metrics.hpp"
#include "rgl/mixture.hpp"

namespace rgl {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

void prepare_out_dir(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
}

fs::path or_default(const std::optional<fs::path>& p, const fs::path& fallback) { return p ? *p : fallback; }

DirectedGraph load_graph(const std::optional<fs::path>& configured, const fs::path& out_dir) {
  const fs::path path = or_default(configured, out_dir / "graph.txt");
  if (!fs::exists(path)) throw DataError("graph file not found: " + path.string());
  return read_graph(path);
}

json histogram(const std::vector<std::size_t>& values) {
  std::size_t top = 0;
  for (auto v : values) top = std::max(top, v);
  std::vector<std::size_t> counts(values.empty() ? 0 : top + 1, 0);
  for (auto v : values) ++counts[v];
  return counts;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_gen_graph(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const GraphSpec& spec = config.graph;
  DirectedGraph g = spec.family == "sbm" ? generate_sbm(spec.n, spec.k, spec.p_in, spec.p_out, spec.seed)
                                         : generate_er(spec.n, spec.p, spec.seed);
  prepare_out_dir(out_dir);
  write_graph(out_dir / "graph.txt", g);

  std::vector<std::size_t> out_deg(g.node_count()), in_deg(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out_deg[v] = g.out_degree(v);
    in_deg[v] = g.predecessors(v).size();
  }
  json stats;
  stats["family"] = spec.family;
  stats["nodes"] = g.node_count();
  stats["edges"] = g.edge_count();
  stats["seed"] = g.seed();
  if (spec.family == "sbm") {
    stats["params"] = {{"k", spec.k}, {"p_in", spec.p_in}, {"p_out", spec.p_out}};
  } else {
    stats["params"] = {{"p", spec.p}};
  }
  stats["out_degree_histogram"] = histogram(out_deg);
  stats["in_degree_histogram"] = histogram(in_deg);
  std::vector<std::size_t> sizes;
  if (const auto& community = g.community()) {
    for (auto c : *community) {
      if (c >= sizes.size()) sizes.resize(c + 1, 0);
      ++sizes[c];
    }
  }
  stats["community_sizes"] = sizes;
  stats["reachable_pairs"] = reachable_pairs(g).size();
  write_file(out_dir / "graph.stats.json", stats.dump(2) + "\n");
  log << "graph: " << g.node_count() << " nodes, " << g.edge_count() << " edges -> "
      << (out_dir / "graph.txt").string() << '\n';
}

// ---------------------------------------------------------------------------

void cmd_corpus(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const CorpusSpec& spec = config.corpus;
  const DirectedGraph g = load_graph(spec.graph_file, out_dir);
  const bool intrinsic = spec.kind == "intrinsic";
  if (intrinsic && g.node_count() > 63) throw ConfigError("invalid value for 'corpus.kind': intrinsic corpora need <= 63 nodes");

  CorpusOptions options;
  options.paths_per_pair_cap = spec.paths_per_pair_cap;
  options.subgraph_cap = spec.subgraph_cap;
  options.include_empty_context = spec.include_empty_context;
  options.filter.min_paths = spec.min_paths;
  options.max_tokens = spec.max_tokens;

  CorpusStats stats;
  auto samples = intrinsic ? build_intrinsic_corpus(g, options, &stats) : build_extrinsic_corpus(g, options, &stats);
  if (samples.empty()) throw DataError("empty query universe: no samples survive the corpus filters");
  const std::size_t total = samples.size();
  SplitResult split = build_split(std::move(samples), spec.split);

  CorpusOptions probe_options;
  probe_options.paths_per_pair_cap = spec.paths_per_pair_cap;
  probe_options.max_tokens = std::numeric_limits<std::size_t>::max();
  const auto probe = build_extrinsic_corpus(g, probe_options);

  prepare_out_dir(out_dir);
  emit_dataset(out_dir / "train.jsonl", split.train);
  emit_dataset(out_dir / "test.jsonl", split.test);
  emit_dataset(out_dir / "probe.jsonl", probe);

  auto count_paths = [](const std::vector<QuerySample>& v) {
    std::size_t n = 0;
    for (const auto& s : v) n += s.truth_paths.size();
    return n;
  };
  json manifest;
  manifest["kind"] = spec.kind;
  manifest["nodes"] = g.node_count();
  manifest["vocabulary_size"] = Vocabulary(g.node_count()).size();
  manifest["contexts_consumed"] = stats.contexts_consumed;
  manifest["queries_considered"] = stats.queries;
  manifest["dropped_path_filter"] = stats.dropped_path_filter;
  manifest["dropped_token_cap"] = stats.dropped_token_cap;
  manifest["duplicate_queries"] = stats.duplicate_queries;
  manifest["samples"] = total;
  manifest["train_fraction"] = spec.split.train_fraction;
  manifest["train_ratio"] = spec.split.train_ratio;
  manifest["split_seed"] = spec.split.seed;
  manifest["leakage_filter"] = std::string(to_string(spec.split.filter));
  manifest["train_before_ratio"] = split.train_before_ratio;
  manifest["train"] = split.train.size();
  manifest["train_paths"] = count_paths(split.train);
  manifest["test_before_filter"] = split.test_before_filter;
  manifest["leaked_samples_removed"] = split.leaked_samples_removed;
  manifest["leaked_paths_pruned"] = split.leaked_paths_pruned;
  manifest["test"] = split.test.size();
  manifest["test_paths"] = count_paths(split.test);
  manifest["test_empty"] = split.test_empty;
  manifest["probe"] = probe.size();
  write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  log << "corpus: " << total << " samples, train " << split.train.size() << ", test " << split.test.size()
      << " (" << split.leaked_samples_removed << " leaked removed), probe " << probe.size() << '\n';
  if (split.test_empty) log << "warning: test split is empty\n";
}

// ---------------------------------------------------------------------------

namespace {

struct Checkpoint {
  std::optional<std::uint64_t> epoch;
  fs::path path;
};

std::optional<std::uint64_t> epoch_of(const fs::path& p) {
  static const std::regex pattern(R"(epoch_(\d+)(\..*)?)");
  std::smatch m;
  const std::string name = p.filename().string();
  if (!std::regex_match(name, m, pattern)) return std::nullopt;
  try {
    return std::stoull(m[1].str());
  } catch (const std::out_of_range&) {
    return std::nullopt;
  }
}

std::vector<Checkpoint> find_checkpoints(const fs::path& source) {
  if (!fs::exists(source)) throw DataError("predictions not found: " + source.string());
  if (!fs::is_directory(source)) return {{epoch_of(source), source}};
  std::map<std::uint64_t, fs::path> by_epoch;
  for (const auto& entry : fs::directory_iterator(source)) {
    if (!entry.is_regular_file()) continue;
    if (auto e = epoch_of(entry.path())) {
      if (!by_epoch.emplace(*e, entry.path()).second) {
        throw DataError("two prediction files for epoch " + std::to_string(*e) + " in " + source.string());
      }
    }
  }
  if (by_epoch.empty()) throw DataError("no epoch_<n> prediction files in " + source.string());
  std::vector<Checkpoint> out;
  for (auto& [e, p] : by_epoch) out.push_back({e, p});
  return out;
}

}  // namespace

void cmd_evaluate(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const EvaluateSpec& spec = config.evaluate;
  const DirectedGraph g = load_graph(spec.graph_file, out_dir);
  const auto samples = read_dataset(or_default(spec.dataset, out_dir / "test.jsonl"));
  for (const auto& s : samples) {
    if (s.tokens.empty() || !g.contains(s.source) || !g.contains(s.target)) {
      throw DataError("dataset does not match the graph (query " + s.query_id.hex() + ")");
    }
  }
  const Vocabulary vocab(g.node_count());
  for (const auto& s : samples) {
    const Marker lead = s.kind == QueryKind::intrinsic ? Marker::edge : Marker::source;
    if (s.tokens.front() != vocab.marker(lead)) throw DataError("dataset vocabulary does not match the graph");
  }
  const auto checkpoints = find_checkpoints(or_default(spec.predictions, out_dir / "predictions"));

  ScoringOptions options;
  options.require_endpoints = spec.require_endpoints;
  prepare_out_dir(out_dir);
  std::ostringstream csv;
  csv << "epoch,metric,value\n";
  for (const auto& cp : checkpoints) {
    const auto preds = read_predictions(cp.path);
    EvalReport report;
    try {
      report = evaluate(g, samples, preds, options);
    } catch (const DataError& e) {
      throw DataError(cp.path.string() + ": " + e.what());
    }
    const std::string epoch = cp.epoch ? std::to_string(*cp.epoch) : "0";
    const fs::path report_path = out_dir / (cp.epoch ? "report_epoch_" + epoch + ".txt" : std::string("report.txt"));
    write_file(report_path, format_report(report));
    for (const auto& [name, value] : report_metrics(report)) {
      csv << epoch << ',' << name << ',' << (value ? format_number(*value) : "nan") << '\n';
    }
    log << "epoch " << epoch << ": acc_exist=" << format_number(report.acc_exist)
        << " acc_local=" << (report.acc_local ? format_number(*report.acc_local) : "undefined")
        << " acc_global=" << format_number(report.global.accuracy) << '\n';
  }
  write_file(out_dir / "metrics.csv", csv.str());
}

// ---------------------------------------------------------------------------

namespace {

struct AuditSummary {
  std::size_t triples = 0;
  std::size_t decisions = 0;
  std::size_t condition_holds = 0;
  std::size_t argmax_flips = 0;
  std::size_t counterexamples = 0;  // condition holds but the argmax does not flip
  bool truncated = false;
};

// Premise-satisfying (v, m, u, d) triples for windows up to K, at most `cap`.
std::vector<ShortcutAnalysis> collect_shortcuts(const DirectedGraph& g, const TransitionPowers& powers,
                                                std::size_t cap, bool& truncated) {
  std::vector<ShortcutAnalysis> found;
  const std::size_t window = powers.window();
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto to_u = bfs_distances(g, u, Direction::backward);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      const std::size_t d = to_u[v];
      if (d == kUnreachable || d < 2 || d > window) continue;
      for (NodeId m : g.successors(v)) {
        if (to_u[m] != d - 1) continue;
        auto a = analyze_shortcut_general(g, powers, v, m, u, d);
        if (!a.premises_hold) continue;
        if (found.size() == cap) {
          truncated = true;
          return found;
        }
        found.push_back(std::move(a));
      }
    }
  }
  return found;
}

}  // namespace

void cmd_simulate(const RunConfig& config, const fs::path& out_dir, std::ostream& log) {
  const SimulateSpec& spec = config.simulate;
  if (spec.lambda_grid.empty()) throw ConfigError("invalid value for 'simulate.lambda_grid': grid is empty");
  std::vector<MixtureWeights> grid;
  for (const auto& raw : spec.lambda_grid) {
    if (raw.size() > spec.power_cap) {
      throw ConfigError("invalid value for 'simulate.lambda_grid': window " + std::to_string(raw.size()) +
                        " exceeds simulate.power_cap " + std::to_string(spec.power_cap));
    }
    try {
      grid.emplace_back(raw);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("invalid value for 'simulate.lambda_grid': ") + e.what());
    }
  }

  const DirectedGraph g = load_graph(spec.graph_file, out_dir);
  std::vector<std::pair<NodeId, NodeId>> pairs;
  if (spec.pairs.empty()) {
    pairs = reachable_pairs(g);
  } else {
    for (const auto& [s, t] : spec.pairs) {
      if (!g.contains(s) || !g.contains(t) || s == t) {
        throw ConfigError("invalid value for 'simulate.pairs': (" + std::to_string(s) + ", " + std::to_string(t) +
                          ") is not a pair of distinct graph nodes");
      }
      pairs.emplace_back(s, t);
    }
  }

  const auto rows = compression_sweep(g, grid, pairs, spec.max_len);
  prepare_out_dir(out_dir);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  write_file(out_dir / "sweep.csv", csv.str());

  json manifest;
  manifest["nodes"] = g.node_count();
  manifest["edges"] = g.edge_count();
  manifest["pairs"] = pairs.size();
  manifest["grid_size"] = grid.size();

  if (spec.audit) {
    AuditSummary summary;
    std::ostringstream audit;
    std::map<std::size_t, std::pair<std::shared_ptr<const TransitionPowers>, std::vector<ShortcutAnalysis>>> by_window;
    for (const auto& w : grid) {
      if (w.window() < 2 || by_window.contains(w.window())) continue;
      auto powers = std::make_shared<const TransitionPowers>(g, w.window());
      auto found = collect_shortcuts(g, *powers, spec.audit_cap, summary.truncated);
      summary.triples += found.size();
      by_window.emplace(w.window(), std::make_pair(std::move(powers), std::move(found)));
    }
    for (const auto& w : grid) {
      auto it = by_window.find(w.window());
      if (it == by_window.end()) continue;
      const auto& [powers, found] = it->second;
      for (const auto& a : found) {
        const ShortcutDecision d = decide_shortcut(a, *powers, w);
        ++summary.decisions;
        if (d.condition_holds) ++summary.condition_holds;
        if (d.argmax_flips) ++summary.argmax_flips;
        if (d.condition_holds && !d.argmax_flips) ++summary.counterexamples;
        audit << to_json(a, d, w) << '\n';
      }
    }
    write_file(out_dir / "audit.jsonl", audit.str());
    manifest["audit"] = {{"triples", summary.triples},
                         {"decisions", summary.decisions},
                         {"condition_holds", summary.condition_holds},
                         {"argmax_flips", summary.argmax_flips},
                         {"counterexamples", summary.counterexamples},
                         {"truncated", summary.truncated}};
    log << "audit: " << summary.decisions << " decisions, " << summary.counterexamples << " counterexamples\n";
  }
  write_file(out_dir / "simulate.json", manifest.dump(2) + "\n");
  log << "sweep: " << rows.size() << " weight vectors over " << pairs.size() << " pairs -> "
      << (out_dir / "sweep.csv").string() << '\n';
}

// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph-based reasoning lab: graphs, corpora, evaluation and mixture simulation"};
  app.require_subcommand(1);
  fs::path config_path, out_dir;
  using Command = void (*)(const RunConfig&, const fs::path&, std::ostream&);
  const std::pair<const char*, Command> table[] = {
      {"gen-graph", cmd_gen_graph},
      {"corpus", cmd_corpus},
      {"evaluate", cmd_evaluate},
      {"simulate", cmd_simulate},
  };
  std::vector<std::pair<CLI::App*, Command>> commands;
  const char* help[] = {"Generate an ER or SBM graph", "Build train/test/probe datasets",
                        "Score prediction files", "Run the mixture-model compression sweep"};
  for (std::size_t i = 0; i < 4; ++i) {
    CLI::App* sub = app.add_subcommand(table[i].first, help[i]);
    sub->add_option("--config", config_path, "JSON run config")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    commands.emplace_back(sub, table[i].second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig config = load_config(config_path);
    for (const auto& [sub, fn] : commands) {
      if (!sub->parsed()) continue;
      fn(config, out_dir, out);
      write_file(out_dir / (std::string(sub->get_name()) + ".config.json"), dump_config(config));
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace rgl
