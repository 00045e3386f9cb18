#include <benchmark/benchmark.h>

#include <omp.h>

#include <map>

#include "nsdarcy/coupled.hpp"
#include "nsdarcy/forms.hpp"
#include "nsdarcy/parallel.hpp"
#include "nsdarcy/sparse.hpp"

using namespace nsdarcy;

namespace {

const CoupledSpaces& spaces(int n) {
  static std::map<int, std::pair<CoupledMesh, CoupledSpaces>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    CoupledMesh m = build_coupled_mesh(n);
    CoupledSpaces s = make_spaces(m, 1);
    it = cache.emplace(n, std::make_pair(std::move(m), std::move(s))).first;
  }
  return it->second.second;
}

// range(0): subdivisions, range(1): threads (1 = serial path)
void BM_AssembleAf(benchmark::State& state) {
  const CoupledSpaces& s = spaces(static_cast<int>(state.range(0)));
  set_assembly_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_af(*s.velocity, {}));
  set_assembly_threads(1);
}

void BM_AssembleConvection(benchmark::State& state) {
  const CoupledSpaces& s = spaces(static_cast<int>(state.range(0)));
  ManufacturedProblem mp;
  const DiscreteField a = interpolate(VectorFunction([&](Point2 x) { return mp.velocity(x); }), s.velocity);
  set_assembly_threads(static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(assemble_convection(*s.velocity, a, ConvectionMode::Newton, {}));
  set_assembly_threads(1);
}

void BM_SpmvSerial(benchmark::State& state) {
  const CoupledSpaces& s = spaces(static_cast<int>(state.range(0)));
  const CsrMatrix a = assemble_af(*s.velocity, {});
  const std::vector<double> x(a.cols(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(spmv_serial(a, x));
}

void BM_SpmvParallel(benchmark::State& state) {
  const CoupledSpaces& s = spaces(static_cast<int>(state.range(0)));
  const CsrMatrix a = assemble_af(*s.velocity, {});
  const std::vector<double> x(a.cols(), 1.0);
  set_assembly_threads(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(spmv(a, x));
  set_assembly_threads(1);
}

void thread_args(benchmark::internal::Benchmark* b) {
  const int maxt = omp_get_max_threads();
  for (int n : {64, 128})
    for (int t = 1; t <= maxt; t *= 2) b->Args({n, t});
}

}  // namespace

BENCHMARK(BM_AssembleAf)->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleConvection)->Apply(thread_args)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpmvSerial)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SpmvParallel)->Apply(thread_args)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
