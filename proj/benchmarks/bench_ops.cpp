#include <benchmark/benchmark.h>

#include "contlab/kahler.hpp"
#include "contlab/spectral.hpp"
#include "contlab/system.hpp"
#include "contlab/trig.hpp"

using namespace contlab;

namespace {

GridSpec grid1(int points) {
  GridSpec g;
  g.n = 1;
  g.points_per_axis = points;
  return g;
}

TrigTerm wave(int kx, int ky, double amp, double phase) {
  TrigTerm t;
  t.wave[0] = kx;
  t.wave[1] = ky;
  t.amplitude = amp;
  t.phase = phase;
  return t;
}

void BM_ComplexHessian(benchmark::State& state) {
  GridSpec g = grid1(static_cast<int>(state.range(0)));
  ScalarField f = random_trig(g, 11, 5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(complex_hessian(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.total_nodes()));
}

void BM_MetricLaplacian(benchmark::State& state) {
  GridSpec g = grid1(static_cast<int>(state.range(0)));
  KahlerMetricField m = make_metric(
      add(flat_metric(g).g, complex_hessian(evaluate_trig(g, {wave(1, 0, 0.2, 0.0)}))));
  ScalarField f = random_trig(g, 12, 5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(m, f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.total_nodes()));
}

void BM_FormLaplacianClosed(benchmark::State& state) {
  GridSpec g = grid1(static_cast<int>(state.range(0)));
  KahlerMetricField m = make_metric(
      add(flat_metric(g).g, complex_hessian(evaluate_trig(g, {wave(1, 0, 0.2, 0.0)}))));
  HermitianFormField form =
      add(scaled(flat_metric(g).g, 0.4), complex_hessian(random_trig(g, 13, 4, 0.3)));
  for (auto _ : state) benchmark::DoNotOptimize(form_laplacian_closed(m, form));
}

// One full coupled rung solve from a cold start: the unit of work every
// ladder repeats per t value.
void BM_CoupledRung(benchmark::State& state) {
  GridSpec g = grid1(static_cast<int>(state.range(0)));
  KahlerMetricField bg = flat_metric(g);
  HermitianFormField alpha =
      add(scaled(bg.g, 0.5), complex_hessian(evaluate_trig(g, {wave(1, 0, 2e-4, 0.0)})));
  ProblemSetup setup = make_coupled_setup(bg, alpha);
  SolverConfig cfg;
  ScalarField zero = make_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(solve_coupled(0.1, setup, zero, zero, cfg));
}

}  // namespace

BENCHMARK(BM_ComplexHessian)->Arg(64)->Arg(128);
BENCHMARK(BM_MetricLaplacian)->Arg(64)->Arg(128);
BENCHMARK(BM_FormLaplacianClosed)->Arg(64)->Arg(128);
BENCHMARK(BM_CoupledRung)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
