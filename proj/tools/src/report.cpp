#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "commands.hpp"
#include "contlab/errors.hpp"
#include "contlab/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace contlab::cli {
namespace {

struct CheckStats {
  int pass = 0;
  int fail = 0;
  int na = 0;
  double worst_margin = 1e300;
  bool has_margin = false;
};

// Aggregates monitors.jsonl by check name so the table shows each invariant
// once with its tightest margin over the whole ladder.
std::map<std::string, CheckStats> read_monitor_stats(const fs::path& path) {
  std::map<std::string, CheckStats> stats;
  std::ifstream in(path);
  if (!in) return stats;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    for (const auto& c : j.at("checks")) {
      CheckStats& s = stats[c.at("name").get<std::string>()];
      const std::string outcome = c.at("outcome").get<std::string>();
      if (outcome == "pass") ++s.pass;
      else if (outcome == "fail") ++s.fail;
      else ++s.na;
      if (c.contains("margin")) {
        double m = c.at("margin").get<double>();
        if (!s.has_margin || m < s.worst_margin) s.worst_margin = m;
        s.has_margin = true;
      }
    }
  }
  return stats;
}

int heatmaps(const fs::path& dir) {
  int written = 0;
  const char* names[] = {"phi_final.bin", "tau_final.bin", "scalar_final.bin"};
  const char* out_names[] = {"phi.pgm", "tau.pgm", "scalar.pgm"};
  for (int i = 0; i < 3; ++i) {
    fs::path src = dir / names[i];
    if (!fs::exists(src)) {
      std::printf("heatmap: %s missing (run with emit_snapshots = true)\n", names[i]);
      continue;
    }
    ScalarField f = io::load_scalar(src.string());
    fs::path dst = dir / out_names[i];
    io::write_heatmap_pgm(dst.string(), f);
    std::printf("heatmap: wrote %s\n", dst.string().c_str());
    ++written;
  }
  return written;
}

}  // namespace

int cmd_report(const std::string& run_dir, bool want_heatmaps) {
  const fs::path dir(run_dir);
  json m;
  try {
    std::ifstream in(dir / "manifest.json");
    if (!in) {
      std::fprintf(stderr, "error: no manifest.json in %s\n", run_dir.c_str());
      return 1;
    }
    m = json::parse(in);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: corrupt manifest in %s: %s\n", run_dir.c_str(), e.what());
    return 1;
  }

  try {
    const std::string verdict = m.at("verdict").get<std::string>();
    std::printf("run: %s\n", run_dir.c_str());
    std::printf("mode %s  grid n=%d points=%d  kappa %g  verdict %s\n",
                m.at("mode").get<std::string>().c_str(), m.at("grid").at("n").get<int>(),
                m.at("grid").at("points").get<int>(), m.at("kappa").get<double>(),
                verdict.c_str());
    const json& cd = m.at("class_data");
    std::printf("classes: volume %.9g  r_bar %.9g  tau_bar %.9g  lambda %.9g\n",
                cd.at("volume").get<double>(), cd.at("r_bar").get<double>(),
                cd.at("tau_bar").get<double>(), cd.at("lambda").get<double>());
    const json& sch = m.at("schedule");
    std::printf("schedule: t0 %g  ratio %g  t_max %g  tol %g\n", sch.at("t0").get<double>(),
                sch.at("ratio").get<double>(), sch.at("t_max").get<double>(),
                sch.at("stationarity_tol").get<double>());
    if (m.value("compression_s", 1.0) != 1.0)
      std::printf("source compression: s = %.9g\n", m.at("compression_s").get<double>());

    std::printf("\n%5s %12s %12s %12s %10s %8s %s\n", "rung", "t", "stat1", "stat2", "C(t)",
                "monitor", "retry");
    for (const auto& r : m.at("rungs")) {
      std::printf("%5d %12.6g %12.3e %12.3e %10.6f %8s %s\n", r.at("rung").get<int>(),
                  r.at("t").get<double>(),
                  r.at("residuals").at("stationarity_first").get<double>(),
                  r.at("residuals").at("stationarity_second").get<double>(),
                  r.at("C_t").get<double>(),
                  r.at("monitor_summary").get<std::string>().c_str(),
                  r.value("inserted_retry", false) ? "retry" : "");
    }

    auto stats = read_monitor_stats(dir / "monitors.jsonl");
    if (!stats.empty()) {
      std::printf("\n%-24s %6s %6s %6s %14s\n", "check", "pass", "fail", "n/a",
                  "worst margin");
      for (const auto& [name, s] : stats) {
        if (s.has_margin)
          std::printf("%-24s %6d %6d %6d %14.3e\n", name.c_str(), s.pass, s.fail, s.na,
                      s.worst_margin);
        else
          std::printf("%-24s %6d %6d %6d %14s\n", name.c_str(), s.pass, s.fail, s.na, "-");
      }
    }

    const json& cons = m.at("conservation");
    std::printf("\nconservation: omega drift %.3e  alpha drift %.3e%s\n",
                cons.at("omega_drift").get<double>(), cons.at("alpha_drift").get<double>(),
                cons.at("flagged").get<bool>() ? "  FLAGGED" : "");

    if (m.contains("limit")) {
      const json& l = m.at("limit");
      std::printf("limit: stationarity %.3e / %.3e  cauchy %.3e / %.3e\n",
                  l.at("stationarity_residuals")[0].get<double>(),
                  l.at("stationarity_residuals")[1].get<double>(),
                  l.at("cauchy_phi").get<double>(), l.at("cauchy_f").get<double>());
      std::printf("limit trace: mean %.9g  oscillation %.3e  (target -lambda = %.9g)\n",
                  l.at("tau_infinity_mean").get<double>(),
                  l.at("tau_infinity_oscillation").get<double>(),
                  -cd.at("lambda").get<double>());
      std::printf("limit scalar: mean %.9g  oscillation %.3e\n",
                  l.at("scalar_infinity_mean").get<double>(),
                  l.at("scalar_infinity_oscillation").get<double>());
      if (l.contains("alpha_plus_lambda_omega_sup"))
        std::printf("limit identities: |alpha + lambda omega| %.3e  |ricci| %.3e\n",
                    l.at("alpha_plus_lambda_omega_sup").get<double>(),
                    l.at("ricci_sup").get<double>());
      if (l.contains("scalar_minus_lambda_tau_sup"))
        std::printf("limit identity: |R - lambda - tau| %.3e\n",
                    l.at("scalar_minus_lambda_tau_sup").get<double>());
    }

    if (verdict == "undecided") {
      bool plateau = false;
      for (const auto& [name, s] : stats)
        if (name == "equivalence-plateau" && s.fail == 0 && s.pass > 0) plateau = true;
      std::printf("undecided: t_max reached before the stationarity target;%s\n",
                  plateau ? " C(t) has plateaued, extend t_max"
                          : " no C(t) plateau yet, the run may need a finer schedule");
    }
    if (verdict == "failed" && m.contains("failure"))
      std::printf("failure at t %.6g: %s\n", m.value("failure_t", 0.0),
                  m.at("failure").get<std::string>().c_str());

    if (want_heatmaps) heatmaps(dir);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: manifest missing expected data: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace contlab::cli
