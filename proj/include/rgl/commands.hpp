#pragma once

#include <filesystem>
#include <iosfwd>

#include "rgl/config.hpp"

namespace rgl {

// Each command reads its inputs from the config (falling back to files in
// out_dir), writes its artifacts into out_dir and prints a short summary.
// Failures surface as ConfigError or DataError.

/// graph.txt and graph.stats.json.
void cmd_gen_graph(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// train.jsonl, test.jsonl, probe.jsonl (one context-free query per reachable
/// pair) and manifest.json.
void cmd_corpus(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// report_epoch_<n>.txt per checkpoint (report.txt for a lone file that is
/// not named epoch_<n>) and metrics.csv with columns epoch,metric,value.
void cmd_evaluate(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// sweep.csv, audit.jsonl and simulate.json.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

/// Exit codes: 0 success, 1 usage or config error, 2 data error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rgl
