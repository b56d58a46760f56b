#pragma once

// Experiment driver: parses JSON configs, dispatches predictor / coversim /
// percolation runs, and emits machine-readable reports (summary.json plus a
// plot-ready scales.csv). Reports separate "theory" (predictor) from
// "empirical" (simulation) blocks and are byte-identical for identical
// (config, seed) regardless of thread count.

#include <string>

#include "json.hpp"

namespace covset {

struct RunResult {
  nlohmann::ordered_json summary;
  std::string scales_csv;  // empty when the command emits no scale table
};

// cmd in {predict, cover-dim, hit, intersect-dim, bad-case, rotate, percolate}.
RunResult run_experiment(const std::string& cmd, const nlohmann::json& config);

// Writes summary.json (and scales.csv when present) under out_dir.
void write_reports(const RunResult& result, const std::string& out_dir);

// Full CLI: subcommand + --config/--seed/--replicas/--threads/--out.
// Exit codes: 0 ok, 2 invalid config, 3 resource cap exceeded, 4 degenerate outcome.
int cli_main(int argc, char** argv);

}  // namespace covset
