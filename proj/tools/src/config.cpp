#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "contlab/errors.hpp"
#include "contlab/io.hpp"
#include "contlab/kahler.hpp"
#include "contlab/monitors.hpp"
#include "contlab/spectral.hpp"

namespace contlab::cli {
namespace {

struct RawEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<RawEntry> read_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path, 0);
  std::vector<RawEntry> entries;
  std::string section, line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", lineno);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    RawEntry e;
    e.section = section;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty()) throw ConfigError("empty key", lineno);
    if (e.section.empty()) throw ConfigError("key before any [section]", lineno);
    entries.push_back(std::move(e));
  }
  return entries;
}

double parse_double(const RawEntry& e) {
  try {
    std::size_t used = 0;
    double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number for '" + e.key + "', got '" + e.value + "'", e.line);
  }
}

int parse_int(const RawEntry& e) {
  try {
    std::size_t used = 0;
    int v = std::stoi(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer for '" + e.key + "', got '" + e.value + "'", e.line);
  }
}

bool parse_bool(const RawEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  throw ConfigError("expected a boolean for '" + e.key + "', got '" + e.value + "'", e.line);
}

TrigTerm parse_term(const RawEntry& e, int n) {
  std::stringstream ss(e.value);
  std::vector<double> toks;
  double v;
  while (ss >> v) toks.push_back(v);
  const std::size_t axes = static_cast<std::size_t>(2 * n);
  if (toks.size() != axes + 2)
    throw ConfigError("term needs " + std::to_string(axes) +
                          " wave numbers then amplitude and phase (got " +
                          std::to_string(toks.size()) + " values)",
                      e.line);
  TrigTerm t;
  for (std::size_t a = 0; a < axes; ++a) {
    double w = toks[a];
    if (w != static_cast<int>(w))
      throw ConfigError("wave numbers must be integers", e.line);
    t.wave[a] = static_cast<int>(w);
  }
  t.amplitude = toks[axes];
  t.phase = toks[axes + 1];
  return t;
}

void check_choice(const RawEntry& e, const std::vector<std::string>& allowed) {
  if (std::find(allowed.begin(), allowed.end(), e.value) == allowed.end()) {
    std::string opts;
    for (const auto& a : allowed) opts += (opts.empty() ? "" : " | ") + a;
    throw ConfigError("'" + e.key + "' must be one of " + opts + ", got '" + e.value + "'",
                      e.line);
  }
}

}  // namespace

RunConfig parse_config(const std::string& path) {
  std::vector<RawEntry> entries = read_entries(path);
  RunConfig rc;

  // First pass: the grid section, so term arity is known everywhere else.
  for (const RawEntry& e : entries) {
    if (e.section != "grid") continue;
    if (e.key == "n") {
      rc.n = parse_int(e);
      if (rc.n != 1 && rc.n != 2) throw ConfigError("n must be 1 or 2", e.line);
    } else if (e.key == "points") {
      rc.points = parse_int(e);
    } else {
      throw ConfigError("unknown [grid] key '" + e.key + "'", e.line);
    }
  }

  for (const RawEntry& e : entries) {
    if (e.section == "grid") continue;
    if (e.section == "run") {
      if (e.key == "mode") {
        check_choice(e, {"coupled", "ke", "conformal"});
        rc.mode = e.value;
      } else if (e.key == "output") {
        rc.output = e.value;
      } else if (e.key == "emit_snapshots") {
        rc.emit_snapshots = parse_bool(e);
      } else if (e.key == "seed") {
        rc.seed = static_cast<std::uint64_t>(parse_int(e));
      } else if (e.key == "lambda_override") {
        rc.has_lambda_override = true;
        rc.lambda_override = parse_double(e);
      } else {
        throw ConfigError("unknown [run] key '" + e.key + "'", e.line);
      }
    } else if (e.section == "background") {
      if (e.key == "kind") {
        check_choice(e, {"flat", "conformal", "snapshot"});
        rc.background_kind = e.value;
      } else if (e.key == "scale") {
        rc.background_scale = parse_double(e);
      } else if (e.key == "term") {
        rc.background_terms.push_back(parse_term(e, rc.n));
      } else if (e.key == "path") {
        rc.background_path = e.value;
      } else {
        throw ConfigError("unknown [background] key '" + e.key + "'", e.line);
      }
    } else if (e.section == "alpha") {
      if (e.key == "kind") {
        check_choice(e, {"zero", "trig", "snapshot"});
        rc.alpha_kind = e.value;
      } else if (e.key == "constant") {
        rc.alpha_constant = parse_double(e);
      } else if (e.key == "term") {
        rc.alpha_terms.push_back(parse_term(e, rc.n));
      } else if (e.key == "path") {
        rc.alpha_path = e.value;
      } else {
        throw ConfigError("unknown [alpha] key '" + e.key + "'", e.line);
      }
    } else if (e.section == "fhat") {
      if (e.key == "kind") {
        check_choice(e, {"zero", "trig", "random"});
        rc.fhat_kind = e.value;
      } else if (e.key == "term") {
        rc.fhat_terms.push_back(parse_term(e, rc.n));
      } else if (e.key == "amplitude") {
        rc.fhat_amplitude = parse_double(e);
      } else if (e.key == "max_mode") {
        rc.fhat_max_mode = parse_int(e);
      } else {
        throw ConfigError("unknown [fhat] key '" + e.key + "'", e.line);
      }
    } else if (e.section == "conformal") {
      if (e.key == "rhat_constant") {
        rc.rhat_constant = parse_double(e);
      } else if (e.key == "rhat_term") {
        rc.rhat_terms.push_back(parse_term(e, rc.n));
      } else if (e.key == "tauhat_constant") {
        rc.tauhat_constant = parse_double(e);
      } else if (e.key == "tauhat_term") {
        rc.tauhat_terms.push_back(parse_term(e, rc.n));
      } else if (e.key == "compress") {
        rc.compress = parse_bool(e);
      } else {
        throw ConfigError("unknown [conformal] key '" + e.key + "'", e.line);
      }
    } else if (e.section == "schedule") {
      if (e.key == "t0") {
        rc.schedule.t0 = parse_double(e);
      } else if (e.key == "ratio") {
        rc.schedule.ratio = parse_double(e);
      } else if (e.key == "t_max") {
        rc.schedule.t_max = parse_double(e);
      } else if (e.key == "stationarity_tol") {
        rc.schedule.stationarity_tol = parse_double(e);
      } else {
        throw ConfigError("unknown [schedule] key '" + e.key + "'", e.line);
      }
    } else if (e.section == "solver") {
      if (e.key == "kappa") {
        rc.solver.kappa = parse_double(e);
      } else if (e.key == "newton_tol") {
        rc.solver.newton_tol = parse_double(e);
      } else if (e.key == "outer_tol") {
        rc.solver.outer_tol = parse_double(e);
      } else if (e.key == "max_newton") {
        rc.solver.max_newton = parse_int(e);
      } else if (e.key == "max_outer") {
        rc.solver.max_outer = parse_int(e);
      } else if (e.key == "krylov_tol") {
        rc.solver.krylov_tol = parse_double(e);
      } else if (e.key == "krylov_max") {
        rc.solver.krylov_max = parse_int(e);
      } else {
        throw ConfigError("unknown [solver] key '" + e.key + "'", e.line);
      }
    } else {
      throw ConfigError("unknown section [" + e.section + "]", e.line);
    }
  }

  try {
    rc.schedule.validate();
    rc.solver.validate();
  } catch (const Error& err) {
    throw ConfigError(err.what(), 0);
  }
  if (!(rc.solver.kappa > 0.0)) throw ConfigError("kappa must be positive", 0);
  return rc;
}

namespace {

KahlerMetricField build_background(const RunConfig& rc, const GridSpec& g) {
  if (rc.background_kind == "flat") return flat_metric(g, rc.background_scale);
  if (rc.background_kind == "snapshot") {
    HermitianFormField h = io::load_form(rc.background_path);
    require_same_grid(g, h.grid, "background snapshot");
    return make_metric(h);
  }
  // conformal factor: scale * e^{expr} * identity (surface backgrounds only)
  if (g.n != 1) throw Error("conformal-factor backgrounds need n = 1");
  ScalarField u0 = evaluate_trig(g, rc.background_terms);
  HermitianFormField h = zero_form(g);
  for (std::size_t i = 0; i < g.total_nodes(); ++i)
    h.at(i, 0, 0) = cplx(rc.background_scale * std::exp(u0.real_at(i)), 0.0);
  return make_metric(h);
}

HermitianFormField build_alpha(const RunConfig& rc, const KahlerMetricField& bg) {
  const GridSpec& g = bg.grid();
  if (rc.alpha_kind == "zero") return zero_form(g);
  if (rc.alpha_kind == "snapshot") {
    HermitianFormField h = io::load_form(rc.alpha_path);
    require_same_grid(g, h.grid, "alpha snapshot");
    return h;
  }
  HermitianFormField h = scaled(bg.g, rc.alpha_constant);
  if (!rc.alpha_terms.empty())
    h = add(h, complex_hessian(evaluate_trig(g, rc.alpha_terms)));
  return h;
}

ScalarField build_fhat(const RunConfig& rc, const GridSpec& g) {
  if (rc.fhat_kind == "zero") return make_field(g);
  if (rc.fhat_kind == "trig") return evaluate_trig(g, rc.fhat_terms);
  return random_trig(g, rc.seed, rc.fhat_max_mode, rc.fhat_amplitude);
}

void gate_lambda_override(const RunConfig& rc, double derived) {
  if (!rc.has_lambda_override) return;
  const double tol = 1e-10 * (1.0 + std::abs(derived));
  if (std::abs(rc.lambda_override - derived) > tol)
    throw CompatibilityFailure("lambda override " + std::to_string(rc.lambda_override) +
                               " disagrees with the class value " + std::to_string(derived));
}

}  // namespace

BuiltProblem build_problem(const RunConfig& rc) {
  GridSpec g;
  g.n = rc.n;
  g.points_per_axis = rc.points > 0 ? rc.points : default_grid(rc.n).points_per_axis;
  g.validate();

  BuiltProblem bp;
  bp.solver = rc.solver;
  bp.schedule = rc.schedule;

  KahlerMetricField bg = build_background(rc, g);
  if (rc.mode == "coupled") {
    bp.setup = make_coupled_setup(bg, build_alpha(rc, bg));
    gate_lambda_override(rc, bp.setup.classes.lambda);
  } else if (rc.mode == "ke") {
    // Prescribed-source route; an override here selects twisted fixtures.
    const double lambda = rc.has_lambda_override ? rc.lambda_override : 0.0;
    if (lambda > 0.0) throw CompatibilityFailure("lambda override must be <= 0");
    bp.setup = make_ke_setup_prescribed(bg, build_fhat(rc, g), lambda);
  } else {
    if (g.n != 1) throw Error("conformal mode needs n = 1");
    ScalarField rhat = shifted(evaluate_trig(g, rc.rhat_terms), rc.rhat_constant);
    ScalarField tauhat = shifted(evaluate_trig(g, rc.tauhat_terms), rc.tauhat_constant);
    if (rc.compress) {
      CompressionResult res = check_a1_and_compress(tauhat, rhat, bg);
      bp.compressed = res.compressed;
      bp.compression_s = res.s;
      tauhat = res.tauhat;
    }
    bp.setup = make_conformal_setup(bg, rhat, tauhat);
    gate_lambda_override(rc, bp.setup.classes.lambda);
  }
  return bp;
}

int thread_limit() {
  const char* env = std::getenv("CONTLAB_THREADS");
  if (env && *env) {
    int v = std::atoi(env);
    return v < 1 ? 1 : v;
  }
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  return hw < 1 ? 1 : hw;
}

}  // namespace contlab::cli
