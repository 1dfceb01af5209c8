#include <benchmark/benchmark.h>

#include "magnon/kernels.hpp"

using namespace magnon;

namespace {

ValidatedParams closed_set() { return validate_params(SystemParams::resonant(0.4, 0.3, 0.35)); }

ValidatedParams lossy_set() {
  SystemParams p = SystemParams::resonant(0.4, 0.3, 0.35);
  p.Gamma_c = Quantity::bare(0.2);
  return validate_params(p);
}

std::vector<double> j_values(std::size_t n) {
  std::vector<double> J(n);
  for (std::size_t i = 0; i < n; ++i) J[i] = 0.05 + 1.15 * static_cast<double>(i) / static_cast<double>(n - 1);
  return J;
}

template <bool Parallel>
void BM_SweepJt(benchmark::State& state) {
  const auto J = j_values(static_cast<std::size_t>(state.range(0)));
  const TimeGrid grid = TimeGrid::uniform(0.0, 40.0, 401);
  const ModePair pair{Mode::m1, Mode::m2};
  for (auto _ : state) {
    auto r = Parallel ? kernels::sweep_jt_parallel(closed_set(), pair, J, grid)
                      : kernels::sweep_jt_serial(closed_set(), pair, J, grid);
    benchmark::DoNotOptimize(r.c.data());
  }
}

template <bool Parallel>
void BM_PeakCurve(benchmark::State& state) {
  std::vector<double> r;
  for (int i = 0; i < state.range(0); ++i) r.push_back(0.2 + 0.1 * i);
  for (auto _ : state) {
    auto c = Parallel ? kernels::peak_curve_parallel(PairKind::q1m2, r, 1.0)
                      : kernels::peak_curve_serial(PairKind::q1m2, r, 1.0);
    benchmark::DoNotOptimize(c.data());
  }
}

template <bool Parallel>
void BM_QsdEnsemble(benchmark::State& state) {
  const ValidatedParams p = lossy_set();
  const BathConfig b = BathConfig::from(p, 0.7);
  const TimeGrid grid = TimeGrid::uniform(0.0, 20.0, 101);
  kernels::EnsembleRequest rq;
  rq.trajectories = static_cast<std::size_t>(state.range(0));
  rq.batches = 4;
  for (auto _ : state) {
    auto e = Parallel ? kernels::qsd_ensemble_parallel(p, b, initial_state(Mode::q1), grid, rq)
                      : kernels::qsd_ensemble_serial(p, b, initial_state(Mode::q1), grid, rq);
    benchmark::DoNotOptimize(e.density.states.data());
  }
}

}  // namespace

BENCHMARK(BM_SweepJt<false>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepJt<true>)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PeakCurve<false>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PeakCurve<true>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QsdEnsemble<false>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QsdEnsemble<true>)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
