#include "contlab/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "contlab/errors.hpp"

namespace contlab {

void LadderSchedule::validate() const {
  if (!(t0 > 0.0)) throw Error("schedule: t0 must be positive");
  if (!(ratio > 1.0)) throw Error("schedule: ratio must exceed 1");
  if (!(t_max >= t0)) throw Error("schedule: t_max must not precede t0");
  if (!(stationarity_tol > 0.0)) throw Error("schedule: stationarity_tol must be positive");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "converged";
    case Verdict::Undecided: return "undecided";
    case Verdict::Failed: return "failed";
  }
  return "unknown";
}

namespace {

ContinuityState solve_at(double t, const ProblemSetup& setup, const ContinuityState* warm,
                         const SolverConfig& config, const TelemetrySink& sink) {
  ScalarField a = warm ? warm->phi : make_field(setup.grid);
  ScalarField b;
  if (warm)
    b = setup.mode == SystemMode::Conformal ? warm->tau : warm->f;
  else
    b = make_field(setup.grid);
  switch (setup.mode) {
    case SystemMode::Coupled:
      return solve_coupled(t, setup, a, b, config, sink);
    case SystemMode::KahlerEinstein:
      return solve_ke(t, setup, a, config, sink);
    case SystemMode::Conformal:
      return solve_conformal(t, setup, a, b, config, sink);
  }
  throw Error("run_ladder: unknown system mode");
}

ClassConservationEntry baseline_entry(const ProblemSetup& setup) {
  if (setup.mode != SystemMode::Conformal)
    return class_integrals(setup.background, setup.background, setup.alpha_hat);
  // Conformal conserved pair: total area and the tauhat integral (the exact
  // t -> 0 limit of the evolving pairings).
  ClassConservationEntry e;
  e.omega_integral = setup.classes.volume;
  e.alpha_integral = setup.classes.tau_bar * setup.classes.volume;
  ScalarField weighted = det_field(setup.background);
  double l1 = 0.0;
  for (std::size_t i = 0; i < setup.grid.total_nodes(); ++i)
    l1 += std::abs(setup.tauhat.real_at(i)) * weighted.real_at(i);
  const double cell = std::pow(setup.grid.spacing(), setup.grid.axes());
  e.alpha_scale = l1 * cell;
  return e;
}

RungRecord observe_rung(int index, const ContinuityState& state, const ProblemSetup& setup,
                        bool inserted) {
  RungRecord rec;
  rec.index = index;
  rec.t = state.t;
  rec.inserted_retry = inserted;
  rec.residual_joint = state.residual_joint;
  auto [s1, s2] = stationarity_residual(state, setup);
  rec.stationarity_first = s1;
  rec.stationarity_second = s2;
  auto [emin, emax] = eigen_bounds(setup.background, state.omega);
  rec.eig_min = emin;
  rec.eig_max = emax;
  rec.equivalence_c = std::max(emax, emin > 0.0 ? 1.0 / emin : 0.0);
  rec.classes = class_integrals(setup.background, state.omega, state.alpha);
  rec.phi_sup = sup_norm(state.phi);
  rec.f_sup = sup_norm(state.f);
  rec.tau_sup = sup_norm(state.tau);
  rec.stats = state.stats;
  return rec;
}

}  // namespace

LadderResult run_ladder(const ProblemSetup& setup, const LadderSchedule& schedule,
                        const SolverConfig& config, const TelemetrySink& sink,
                        const RungObserver& observer) {
  schedule.validate();
  config.validate();

  LadderResult result;
  std::vector<ClassConservationEntry> entries;
  entries.push_back(baseline_entry(setup));

  double t = schedule.t0;
  double t_prev = 0.0;  // last accepted rung
  int index = 0;
  bool pending_retry = false;    // currently solving an inserted midpoint
  double resume_target = 0.0;    // original target to revisit after insertion
  double prev_station = std::numeric_limits<double>::infinity();

  auto rung_sink = [&](const TelemetryRecord& rec) {
    if (!sink) return;
    TelemetryRecord tagged = rec;
    tagged.rung = index;
    sink(tagged);
  };

  while (true) {
    const bool inserted = pending_retry;
    ContinuityState state;
    try {
      if (observer) observer(index, t);
      state = solve_at(t, setup, result.states.empty() ? nullptr : &result.states.back(),
                       config, rung_sink);
    } catch (const ConeExit& e) {
      // One midpoint insertion per target; a failed insertion, a failed
      // revisit, or a failed first rung all count as consecutive failures.
      if (pending_retry || t == resume_target || t_prev <= 0.0) {
        result.verdict = Verdict::Failed;
        result.failure = std::string("rung at t = ") + std::to_string(t) + ": " + e.what();
        result.failure_t = t;
        break;
      }
      pending_retry = true;
      resume_target = t;
      t = std::sqrt(t_prev * t);
      continue;
    } catch (const Error& e) {
      result.verdict = Verdict::Failed;
      result.failure = std::string("rung at t = ") + std::to_string(t) + ": " + e.what();
      result.failure_t = t;
      break;
    }

    RungRecord rec = observe_rung(index, state, setup, inserted);
    const double station = std::max(rec.stationarity_first, rec.stationarity_second);
    if (result.rungs.size() >= 2 && station > 2.0 * prev_station) {
      rec.monotone_warning = true;
      result.monotone_warning = true;
    }
    prev_station = station;

    entries.push_back(rec.classes);
    result.rungs.push_back(rec);
    result.states.push_back(std::move(state));
    ++index;
    t_prev = t;

    if (station <= schedule.stationarity_tol) {
      result.verdict = Verdict::Converged;
      break;
    }
    if (t >= schedule.t_max) {
      result.verdict = Verdict::Undecided;
      break;
    }
    if (pending_retry) {
      pending_retry = false;
      t = resume_target;  // inserted rung succeeded; revisit the real target
    } else {
      if (t == resume_target) resume_target = 0.0;
      t = std::min(t * schedule.ratio, schedule.t_max);
    }
  }

  // A run that failed before its first rung has only the baseline entry and
  // nothing to compare it against.
  if (entries.size() >= 2) result.conservation = summarize_class_conservation(entries);
  return result;
}

std::pair<ProblemSetup, ContinuityState> scaling_transform(const ProblemSetup& setup,
                                                           const ContinuityState& state,
                                                           double M) {
  if (!(M > 0.0)) throw Error("scaling_transform: M must be positive");

  ProblemSetup s = setup;
  s.background = make_metric(scaled(setup.background.g, 1.0 / M));
  s.classes.lambda = M * setup.classes.lambda;
  s.classes.r_bar = M * setup.classes.r_bar;
  s.classes.tau_bar = M * setup.classes.tau_bar;
  s.classes.volume = setup.classes.volume / std::pow(M, setup.grid.n);
  s.defect = setup.defect;  // -Ric + lambda*omega + alpha is scale-invariant
  if (setup.mode == SystemMode::Conformal) {
    s.rhat = scaled(setup.rhat, M);
    s.tauhat = scaled(setup.tauhat, M);
  }

  ContinuityState st = state;
  st.t = state.t / M;
  if (setup.mode == SystemMode::Conformal) {
    st.tau = scaled(state.tau, M);
  } else {
    st.phi = scaled(state.phi, 1.0 / M);
  }
  st.omega = make_metric(scaled(state.omega.g, 1.0 / M));
  st.scalar_curv = scaled(state.scalar_curv, M);
  if (setup.mode == SystemMode::Conformal) {
    const double j1 = sup_norm(conformal_residual_u(st.t, s, st.phi, st.tau));
    // kappa is a config knob, not stored on the setup; the residual scale
    // below uses the same value pattern as the solver (M^2 on the trace
    // equation), so report the conservative max.
    st.residual_joint = std::max(j1, M * M * state.residual_joint);
  } else {
    st.residual_joint = std::max(sup_norm(coupled_residual_phi(st.t, s, st.phi, st.f)),
                                 M * state.residual_joint);
  }
  return {std::move(s), std::move(st)};
}

LimitData extract_limit(const LadderResult& result) {
  if (result.verdict != Verdict::Converged)
    throw Error("extract_limit: run did not converge");
  const ContinuityState& last = result.states.back();

  LimitData lim;
  lim.omega = last.omega;
  lim.alpha = last.alpha;
  lim.tau = last.tau;
  lim.scalar_curv = last.scalar_curv;
  if (result.states.size() >= 2) {
    const ContinuityState& prev = result.states[result.states.size() - 2];
    lim.cauchy_phi = sup_norm(sub(last.phi, prev.phi));
    lim.cauchy_f = last.mode == SystemMode::Conformal
                       ? sup_norm(sub(last.tau, prev.tau))
                       : sup_norm(sub(last.f, prev.f));
  }
  lim.stationarity_first = result.rungs.back().stationarity_first;
  lim.stationarity_second = result.rungs.back().stationarity_second;

  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double smin = tmin, smax = -tmin;
  for (std::size_t i = 0; i < last.tau.values.size(); ++i) {
    tmin = std::min(tmin, last.tau.real_at(i));
    tmax = std::max(tmax, last.tau.real_at(i));
    smin = std::min(smin, last.scalar_curv.real_at(i));
    smax = std::max(smax, last.scalar_curv.real_at(i));
  }
  lim.tau_mean = mean(last.tau);
  lim.tau_oscillation = tmax - tmin;
  lim.scalar_mean = mean(last.scalar_curv);
  lim.scalar_oscillation = smax - smin;
  return lim;
}

}  // namespace contlab
