#include <benchmark/benchmark.h>

#include <srlab/config.hpp>
#include <srlab/operators.hpp>
#include <srlab/spectrum.hpp>

using namespace srlab;

namespace {

SubRiemannianStructure fixture(const char* name) {
  return load_config(std::string(SRLAB_FIXTURE_DIR) + "/" + name + ".cfg").structure();
}

MetricExtension contact() {
  static const MetricExtension ext = [] {
    Rng rng(1);
    auto s = fixture("contact3torus");
    return MetricExtension::canonical(canonical_complement(s, lattice(s.periods, 5), rng));
  }();
  return ext;
}

void BM_ParseDifferentiate(benchmark::State& state) {
  for (auto _ : state) {
    Expr e = parse("exp(sin(x0)*x1^3) / (2 + cos(x0 - 3*x2))", 3);
    benchmark::DoNotOptimize(simplify(differentiate(differentiate(e, 0), 1)));
  }
}
BENCHMARK(BM_ParseDifferentiate);

void BM_Evaluate(benchmark::State& state) {
  Expr e = differentiate(parse("exp(sin(x0)*x1^3) / (2 + cos(x0 - 3*x2))", 3), 0);
  Point p{0.3, 0.7, 1.1};
  for (auto _ : state) benchmark::DoNotOptimize(e.evaluate(p));
}
BENCHMARK(BM_Evaluate);

void BM_StructureConstants(benchmark::State& state) {
  auto s = fixture("engel");
  FrameAlgebra alg(s);
  Point p{0.3, 0.7, 1.1, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(alg.at(p));
}
BENCHMARK(BM_StructureConstants);

void BM_CanonicalComplement(benchmark::State& state) {
  auto s = fixture("heisenberg-tilted");
  auto pts = lattice(s.periods, 5);
  for (auto _ : state) {
    Rng rng(1);
    benchmark::DoNotOptimize(canonical_complement(s, pts, rng));
  }
}
BENCHMARK(BM_CanonicalComplement)->Unit(benchmark::kMillisecond);

void BM_AssembleWeak(benchmark::State& state) {
  auto ext = contact();
  Grid g = Grid::uniform(std::vector<double>(3, 2 * 3.141592653589793),
                         static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_weak_laplacian<double>(ext, g));
}
BENCHMARK(BM_AssembleWeak)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_Lanczos(benchmark::State& state) {
  auto ext = contact();
  Grid g = Grid::uniform(std::vector<double>(3, 2 * 3.141592653589793), static_cast<int>(state.range(0)));
  auto wf = assemble_weak_laplacian<double>(ext, g);
  for (auto _ : state) {
    Rng rng(42);
    benchmark::DoNotOptimize(lanczos_smallest(wf.L, wf.M, {.count = 6}, rng));
  }
}
BENCHMARK(BM_Lanczos)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Dense(benchmark::State& state) {
  auto ext = contact();
  Grid g = Grid::uniform(std::vector<double>(3, 2 * 3.141592653589793), static_cast<int>(state.range(0)));
  auto wf = assemble_weak_laplacian<double>(ext, g);
  for (auto _ : state) benchmark::DoNotOptimize(dense_spectrum(wf.L, wf.M, {.vectors = false}));
}
BENCHMARK(BM_Dense)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
