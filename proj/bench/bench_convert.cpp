// Serial reference converter vs the OpenMP kernels on a synthetic B-scan.

#include <benchmark/benchmark.h>

#include "datff/convert.hpp"
#include "datff/reference.hpp"
#include "datff/synth.hpp"
#include "datff/window_fit.hpp"

namespace {

const datff::FrequencyBScan& scan() {
  static const datff::FrequencyBScan s = [] {
    auto scene = datff::reference_scene();
    scene.n_traces = 16;
    return datff::simulate_bscan(scene);
  }();
  return s;
}

datff::ConversionMethod method(int kind) {
  switch (kind) {
    case 0: return datff::ConversionMethod::idft();
    case 1: return datff::ConversionMethod::isdft(0.01, 0.5);
    default: {
      datff::FitResult f;
      f.gamma = -0.0336;
      return datff::ConversionMethod::datff(datff::build_datff_window(f, 0.5, 1001, 1001));
    }
  }
}

void BM_Reference(benchmark::State& state) {
  const auto m = method(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(datff::reference::convert_bscan(scan(), m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scan().n_traces()));
}

void BM_Parallel(benchmark::State& state) {
  const auto m = method(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(datff::convert_bscan(scan(), m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scan().n_traces()));
}

}  // namespace

BENCHMARK(BM_Reference)->DenseRange(0, 2)->ArgName("method")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->DenseRange(0, 2)->ArgName("method")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
