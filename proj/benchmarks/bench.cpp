#include <benchmark/benchmark.h>

#include "flagmirror/crit.hpp"
#include "flagmirror/mirror.hpp"
#include "flagmirror/qhpartial.hpp"
#include "flagmirror/schubring.hpp"
#include "flagmirror/verify.hpp"

using namespace flagmirror;

namespace {

using cd = std::complex<double>;

void BM_ClassProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Perm u = longest_element(n - 1), v = grassmannian_perm({2, n}, n);
  u = embed(u, n);
  monk_operators(n);
  for (auto _ : state) benchmark::DoNotOptimize(class_product(u, v, n));
}
BENCHMARK(BM_ClassProduct)->DenseRange(4, 6)->Unit(benchmark::kMicrosecond);

void BM_MonkOperators(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(MonkOperators(n));
}
BENCHMARK(BM_MonkOperators)->DenseRange(4, 6)->Unit(benchmark::kMillisecond);

void BM_Superpotential247(benchmark::State& state) {
  FlagShape shape = FlagShape::parse("2,4;7");
  for (auto _ : state) benchmark::DoNotOptimize(superpotential(shape));
}
BENCHMARK(BM_Superpotential247)->Unit(benchmark::kMillisecond);

void BM_FMinusEvaluate(benchmark::State& state) {
  FlagShape shape = FlagShape::parse("1,2,3;4");
  FMinusFunction f(shape);
  CVector x = CVector::Constant(f.dim(), cd(0.8, 0.3));
  std::vector<cd> q(shape.r(), cd(1));
  const bool hessian = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(f.evaluate(x, q, hessian));
}
BENCHMARK(BM_FMinusEvaluate)->Arg(0)->Arg(1);

void BM_C1Spectrum(benchmark::State& state) {
  FlagShape shape = FlagShape::parse("1,2,3;4");
  for (auto _ : state) benchmark::DoNotOptimize(c1_spectrum(shape, {1.0, 1.0, 1.0}));
}
BENCHMARK(BM_C1Spectrum)->Unit(benchmark::kMicrosecond);

void BM_CriticalPoints(benchmark::State& state) {
  const char* names[] = {"2;4", "1,2;4"};
  FlagShape shape = FlagShape::parse(names[state.range(0)]);
  std::vector<cd> q(shape.r(), cd(1));
  CritConfig cfg;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(find_critical_points(shape, q, cfg));
  state.SetLabel(shape.str());
}
BENCHMARK(BM_CriticalPoints)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_KeyIdentitySweep(benchmark::State& state) {
  const int max_n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(key_identity_sweep(max_n, 1));
}
BENCHMARK(BM_KeyIdentitySweep)->DenseRange(5, 6)->Unit(benchmark::kMillisecond);

void BM_DetFormula(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(check_det_formula(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DetFormula)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
