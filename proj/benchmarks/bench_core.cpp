#include "bohm/bohm.hpp"

#include <benchmark/benchmark.h>

using namespace bohm;

static void BM_Dopri5Step(benchmark::State& state) {
  const Rhs f = [](double, const State& y) {
    State d(2);
    d << y(1), -y(0);
    return d;
  };
  State y(2);
  y << 1.0, 0.0;
  const State k1 = f(0.0, y);
  for (auto _ : state) {
    StepAttempt a = dopri5_step(f, 0.0, y, k1, 0.1, 1e-8, 1e-10);
    benchmark::DoNotOptimize(a.error);
  }
}
BENCHMARK(BM_Dopri5Step);

static void BM_CurrentEvaluation(benchmark::State& state) {
  auto p = build_provider(make_scenario("oscillator_superposition"));
  const Vec q = make_vec({0.3});
  double t = 0.0;
  for (auto _ : state) {
    CurrentSample s = p->current(t, q);
    benchmark::DoNotOptimize(s.j0);
    t += 1e-6;
  }
}
BENCHMARK(BM_CurrentEvaluation);

static void BM_IntegrateGaussian(benchmark::State& state) {
  auto p = build_provider(make_scenario("free_gaussian"));
  const Vec q0 = make_vec({0.7});
  for (auto _ : state) {
    Trajectory tr = integrate(*p, p->config_space(), q0, 1.0);
    benchmark::DoNotOptimize(tr.samples.data());
  }
}
BENCHMARK(BM_IntegrateGaussian)->Unit(benchmark::kMicrosecond);

static void BM_SampleInitial(benchmark::State& state) {
  auto sc = make_scenario("free_gaussian");
  auto p = build_provider(sc);
  const GridSpec g = sc->recommended_grid();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Ensemble e = sample_initial(*p, g, n, 7);
    benchmark::DoNotOptimize(e.points.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleInitial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Pushforward(benchmark::State& state) {
  auto sc = make_scenario("free_gaussian");
  auto p = build_provider(sc);
  const Ensemble e0 = sample_initial(*p, sc->recommended_grid(), static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) {
    Ensemble e = pushforward(e0, *p, p->config_space(), 1.0);
    benchmark::DoNotOptimize(e.terminal.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Pushforward)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_SplitStep1D(benchmark::State& state) {
  auto sc = make_scenario("oscillator_superposition");
  const GridSpec g = GridSpec::uniform(1, static_cast<int>(state.range(0)), 10.0);
  SpinorField psi = sample_scenario(*sc, 0.0, g);
  SchrodingerStepper stepper(g, sc->hamiltonian(g), 1e-3);
  for (auto _ : state) {
    stepper.advance(psi);
    benchmark::DoNotOptimize(psi.data.data());
  }
}
BENCHMARK(BM_SplitStep1D)->Arg(512)->Arg(4096)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
