#include "manifest.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <vector>

#include "contlab/errors.hpp"
#include "contlab/io.hpp"
#include "contlab/kahler.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace contlab::cli {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for hashing");
  std::uint64_t h = 1469598103934665603ull;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a(buf, static_cast<std::size_t>(in.gcount()), h);
  return h;
}

namespace {

std::uint64_t hash_u32(std::uint32_t v, std::uint64_t h) { return fnv1a(&v, sizeof v, h); }

std::uint64_t hash_doubles(const double* p, std::size_t count, std::uint64_t h) {
  return fnv1a(p, count * sizeof(double), h);
}

std::uint64_t hash_cplx(const std::vector<cplx>& v, std::uint64_t h) {
  return fnv1a(v.data(), v.size() * sizeof(cplx), h);
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json check_json(const CheckResult& c) {
  json j;
  j["name"] = c.name;
  j["outcome"] = outcome_name(c.outcome);
  if (c.outcome != CheckOutcome::NotApplicable) {
    j["bound"] = c.bound;
    j["observed"] = c.observed;
    j["margin"] = c.margin;
  }
  return j;
}

json merged_reports_json(int rung, double t, const std::vector<MonitorReport>& reports) {
  json j;
  j["rung"] = rung;
  j["t"] = t;
  bool ok = true;
  json checks = json::array();
  for (const auto& rep : reports) {
    ok = ok && rep.all_passed();
    for (const auto& c : rep.checks) checks.push_back(check_json(c));
  }
  j["all_passed"] = ok;
  j["checks"] = std::move(checks);
  return j;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
}

}  // namespace

std::uint64_t hash_setup(const ProblemSetup& setup) {
  std::uint64_t h = 1469598103934665603ull;
  h = hash_u32(static_cast<std::uint32_t>(setup.mode), h);
  h = hash_u32(static_cast<std::uint32_t>(setup.grid.n), h);
  h = hash_u32(static_cast<std::uint32_t>(setup.grid.points_per_axis), h);
  h = hash_u32(setup.fhat_prescribed ? 1u : 0u, h);
  const double cls[] = {setup.classes.volume, setup.classes.r_bar, setup.classes.tau_bar,
                        setup.classes.lambda};
  h = hash_doubles(cls, 4, h);
  h = hash_cplx(setup.background.g.comps, h);
  h = hash_cplx(setup.alpha_hat.comps, h);
  h = hash_cplx(setup.fhat.values, h);
  h = hash_cplx(setup.defect.comps, h);
  h = hash_cplx(setup.rhat.values, h);
  h = hash_cplx(setup.tauhat.values, h);
  return h;
}

std::vector<MonitorReport> rung_monitors(const ContinuityState& state,
                                         const ProblemSetup& setup, double kappa) {
  std::vector<MonitorReport> reports;
  if (state.mode == SystemMode::Conformal) {
    reports.push_back(check_conformal_bounds(state, setup));
  } else {
    reports.push_back(check_potential_bounds(state, setup, kappa));
    reports.push_back(check_scalar_lower_bound(state, setup));
  }
  reports.push_back(check_metric_equivalence(state, setup));
  return reports;
}

std::vector<MonitorReport> ladder_monitors(const LadderResult& result,
                                           const ProblemSetup& setup) {
  std::vector<MonitorReport> reports;
  reports.push_back(check_equivalence_growth(result.rungs));
  if (setup.mode != SystemMode::Conformal)
    reports.push_back(check_ct_bound(result.states, setup));
  return reports;
}

int verdict_exit_code(Verdict v) {
  switch (v) {
    case Verdict::Converged: return 0;
    case Verdict::Undecided: return 2;
    case Verdict::Failed: return 1;
  }
  return 1;
}

void write_run_outputs(const std::string& dir, const RunConfig& rc, const BuiltProblem& bp,
                       const LadderResult& result,
                       const std::vector<TelemetryRecord>& telemetry,
                       const std::string& config_path) {
  fs::create_directories(dir);
  const ProblemSetup& setup = bp.setup;

  {
    std::ofstream out(fs::path(dir) / "telemetry.jsonl", std::ios::binary);
    if (!out) throw Error("cannot write telemetry.jsonl in " + dir);
    for (const auto& r : telemetry) {
      json j;
      j["rung"] = r.rung;
      j["phase"] = r.phase;
      j["iter"] = r.iteration;
      j["residual"] = r.residual;
      out << j.dump() << "\n";
    }
  }

  std::vector<std::string> rung_summary;
  {
    std::ofstream out(fs::path(dir) / "monitors.jsonl", std::ios::binary);
    if (!out) throw Error("cannot write monitors.jsonl in " + dir);
    const std::size_t count = std::min(result.states.size(), result.rungs.size());
    for (std::size_t k = 0; k < count; ++k) {
      auto reports = rung_monitors(result.states[k], setup, bp.solver.kappa);
      json line = merged_reports_json(result.rungs[k].index, result.rungs[k].t, reports);
      rung_summary.push_back(line["all_passed"].get<bool>() ? "pass" : "fail");
      out << line.dump() << "\n";
    }
    if (!result.states.empty()) {
      auto tail = ladder_monitors(result, setup);
      out << merged_reports_json(-1, result.states.back().t, tail).dump() << "\n";
    }
  }

  json m;
  m["format"] = "contlab-manifest-1";
  m["generated_at"] = timestamp_utc();
  m["mode"] = rc.mode;
  m["grid"] = {{"n", setup.grid.n}, {"points", setup.grid.points_per_axis}};
  m["seed"] = rc.seed;
  m["kappa"] = bp.solver.kappa;
  m["config_hash"] = hex64(hash_file(config_path));
  m["setup_hash"] = hex64(hash_setup(setup));
  m["class_data"] = {{"volume", setup.classes.volume},
                     {"r_bar", setup.classes.r_bar},
                     {"tau_bar", setup.classes.tau_bar},
                     {"lambda", setup.classes.lambda}};
  m["schedule"] = {{"t0", bp.schedule.t0},
                   {"ratio", bp.schedule.ratio},
                   {"t_max", bp.schedule.t_max},
                   {"stationarity_tol", bp.schedule.stationarity_tol}};
  m["compression_s"] = bp.compressed ? bp.compression_s : 1.0;
  m["verdict"] = verdict_name(result.verdict);
  if (result.verdict == Verdict::Failed) {
    m["failure"] = result.failure;
    m["failure_t"] = result.failure_t;
  }
  m["monotone_warning"] = result.monotone_warning;

  json rungs = json::array();
  for (std::size_t k = 0; k < result.rungs.size(); ++k) {
    const RungRecord& r = result.rungs[k];
    json j;
    j["rung"] = r.index;
    j["t"] = r.t;
    j["inserted_retry"] = r.inserted_retry;
    j["residuals"] = {{"joint", r.residual_joint},
                      {"stationarity_first", r.stationarity_first},
                      {"stationarity_second", r.stationarity_second}};
    j["C_t"] = r.equivalence_c;
    j["eig_min"] = r.eig_min;
    j["eig_max"] = r.eig_max;
    j["phi_sup"] = r.phi_sup;
    j["f_sup"] = r.f_sup;
    j["tau_sup"] = r.tau_sup;
    j["iterations"] = {{"outer", r.stats.outer_iterations},
                       {"newton", r.stats.newton_iterations},
                       {"krylov", r.stats.krylov_iterations},
                       {"backtracks", r.stats.backtracks}};
    j["monitor_summary"] = k < rung_summary.size() ? rung_summary[k] : "n/a";
    rungs.push_back(std::move(j));
  }
  m["rungs"] = std::move(rungs);

  m["conservation"] = {{"omega_drift", result.conservation.omega_drift},
                       {"alpha_drift", result.conservation.alpha_drift},
                       {"flagged", result.conservation.flagged}};

  if (result.verdict == Verdict::Converged) {
    LimitData limit = extract_limit(result);
    json lj;
    lj["stationarity_residuals"] =
        json::array({limit.stationarity_first, limit.stationarity_second});
    lj["tau_infinity_mean"] = limit.tau_mean;
    lj["tau_infinity_oscillation"] = limit.tau_oscillation;
    lj["scalar_infinity_mean"] = limit.scalar_mean;
    lj["scalar_infinity_oscillation"] = limit.scalar_oscillation;
    lj["cauchy_phi"] = limit.cauchy_phi;
    lj["cauchy_f"] = limit.cauchy_f;
    const double lambda = setup.classes.lambda;
    if (setup.mode == SystemMode::Conformal) {
      // Limit identity for the surface system: R = lambda + tau.
      const ScalarField defect = zip_fields(
          limit.scalar_curv, limit.tau,
          [&](cplx r, cplx tau) { return r - cplx(lambda, 0.0) - tau; }, FieldKind::Real);
      lj["scalar_minus_lambda_tau_sup"] = sup_norm(defect);
    } else {
      lj["alpha_plus_lambda_omega_sup"] =
          form_sup_vs(setup.background, add(limit.alpha, scaled(limit.omega.g, lambda)));
      lj["ricci_sup"] = form_sup_vs(setup.background, ricci(limit.omega));
    }
    m["limit"] = std::move(lj);
  }

  write_text(fs::path(dir) / "manifest.json", m.dump(2) + "\n");

  if (rc.emit_snapshots && !result.states.empty()) {
    const ContinuityState& last = result.states.back();
    io::write_scalar((fs::path(dir) / "phi_final.bin").string(), last.phi);
    io::write_scalar((fs::path(dir) / "tau_final.bin").string(), last.tau);
    io::write_scalar((fs::path(dir) / "scalar_final.bin").string(), last.scalar_curv);
    if (last.mode != SystemMode::Conformal)
      io::write_scalar((fs::path(dir) / "f_final.bin").string(), last.f);
  }
}

}  // namespace contlab::cli
