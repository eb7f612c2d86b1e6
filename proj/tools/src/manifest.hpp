#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "contlab/continuation.hpp"
#include "contlab/monitors.hpp"

namespace contlab::cli {

std::uint64_t fnv1a(const void* data, std::size_t bytes,
                    std::uint64_t h = 1469598103934665603ull);
std::uint64_t hash_file(const std::string& path);

/// Content hash over everything the solver consumes: mode, grid, class data,
/// and every input field, in a fixed serialization order.
std::uint64_t hash_setup(const ProblemSetup& setup);

/// All per-rung monitors applicable to the state's mode, already evaluated.
std::vector<MonitorReport> rung_monitors(const ContinuityState& state,
                                         const ProblemSetup& setup, double kappa);

/// Ladder-scope monitors (growth of the equivalence constant; linear-growth
/// fit of the potential when the class data allows it).
std::vector<MonitorReport> ladder_monitors(const LadderResult& result,
                                           const ProblemSetup& setup);

/// Writes manifest.json, telemetry.jsonl (from the collected records),
/// monitors.jsonl, and optional snapshots into dir.
void write_run_outputs(const std::string& dir, const RunConfig& rc, const BuiltProblem& bp,
                       const LadderResult& result,
                       const std::vector<TelemetryRecord>& telemetry,
                       const std::string& config_path);

int verdict_exit_code(Verdict v);

}  // namespace contlab::cli
