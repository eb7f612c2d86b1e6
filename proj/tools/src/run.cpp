#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "config.hpp"
#include "contlab/continuation.hpp"
#include "contlab/errors.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;

namespace contlab::cli {
namespace {

struct RunOutcome {
  int exit_code = 1;
  std::string verdict = "error";
  std::string message;
};

RunOutcome execute(const RunConfig& rc, const std::string& config_path, bool echo) {
  RunOutcome out;
  BuiltProblem bp = build_problem(rc);
  std::vector<TelemetryRecord> telemetry;
  auto sink = [&](const TelemetryRecord& rec) { telemetry.push_back(rec); };

  LadderResult result = run_ladder(bp.setup, bp.schedule, bp.solver, sink);
  write_run_outputs(rc.output, rc, bp, result, telemetry, config_path);

  if (echo) {
    for (const RungRecord& r : result.rungs)
      std::printf("rung %3d  t %.6g  stationarity %.3e / %.3e  C %.6f%s\n", r.index, r.t,
                  r.stationarity_first, r.stationarity_second, r.equivalence_c,
                  r.inserted_retry ? "  (retry)" : "");
    std::size_t fails = 0;
    const std::size_t count = std::min(result.states.size(), result.rungs.size());
    for (std::size_t k = 0; k < count; ++k)
      for (const auto& rep : rung_monitors(result.states[k], bp.setup, bp.solver.kappa))
        if (!rep.all_passed()) ++fails;
    for (const auto& rep : ladder_monitors(result, bp.setup))
      if (!rep.all_passed()) ++fails;
    std::printf("monitors: %s across %zu rungs\n", fails == 0 ? "pass" : "FAIL", count);
    if (result.conservation.flagged)
      std::printf("conservation: FLAGGED (omega %.3e, alpha %.3e)\n",
                  result.conservation.omega_drift, result.conservation.alpha_drift);
    std::printf("verdict: %s\n", verdict_name(result.verdict));
    if (result.verdict == Verdict::Failed)
      std::fprintf(stderr, "failure: %s\n", result.failure.c_str());
  }

  out.exit_code = verdict_exit_code(result.verdict);
  out.verdict = verdict_name(result.verdict);
  return out;
}

}  // namespace

int cmd_run(const std::string& config_path) {
  try {
    RunConfig rc = parse_config(config_path);
    return execute(rc, config_path, true).exit_code;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_sweep(const std::string& config_dir) {
  std::vector<fs::path> configs;
  try {
    for (const auto& entry : fs::directory_iterator(config_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".ini")
        configs.push_back(entry.path());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  if (configs.empty()) {
    std::fprintf(stderr, "error: no .ini configs in %s\n", config_dir.c_str());
    return 1;
  }
  std::sort(configs.begin(), configs.end());

  std::vector<RunOutcome> outcomes(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        RunConfig rc = parse_config(configs[i].string());
        // Isolation: every sweep member writes next to its own config.
        fs::path out = configs[i];
        out.replace_extension(".out");
        rc.output = out.string();
        outcomes[i] = execute(rc, configs[i].string(), false);
      } catch (const Error& e) {
        outcomes[i].exit_code = 1;
        outcomes[i].verdict = "error";
        outcomes[i].message = e.what();
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_limit()), configs.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int exit_code = 0;
  bool any_undecided = false;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::printf("%s: %s\n", configs[i].filename().string().c_str(),
                outcomes[i].verdict.c_str());
    if (!outcomes[i].message.empty())
      std::fprintf(stderr, "  %s\n", outcomes[i].message.c_str());
    if (outcomes[i].exit_code == 1) exit_code = 1;
    if (outcomes[i].exit_code == 2) any_undecided = true;
  }
  if (exit_code == 0 && any_undecided) exit_code = 2;
  return exit_code;
}

}  // namespace contlab::cli
