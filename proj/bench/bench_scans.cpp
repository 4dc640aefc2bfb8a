#include <benchmark/benchmark.h>

#include "kdsqnm/inversion.hpp"
#include "kdsqnm/verify.hpp"

namespace {

using kdsqnm::Execution;

void BM_PMatrixScan(benchmark::State& state) {
  const auto exec = static_cast<Execution>(state.range(0));
  kdsqnm::RectangleSpec rect;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kdsqnm::p_matrix_rectangle_scan(rect, 0.04, 100, 0, exec));
  }
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}

void BM_NoiseStudy(benchmark::State& state) {
  const auto exec = static_cast<Execution>(state.range(0));
  const kdsqnm::SpacetimeParams truth(1.0, 0.05, 0.04);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kdsqnm::noise_propagation_study(truth, 0, {100, 200}, {1e-4, 1e-3, 1e-2}, 32, 20240601, exec));
  }
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}

void BM_SeriesFit(benchmark::State& state) {
  const auto exec = static_cast<Execution>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kdsqnm::fit_series_coefficients(kdsqnm::SeriesQuantity::Omega_plus, 1.0, 0.04,
                                                             {}, 4, std::nullopt, exec));
  }
  state.SetLabel(exec == Execution::serial ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_PMatrixScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseStudy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeriesFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
