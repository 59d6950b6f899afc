#include <benchmark/benchmark.h>

#include <cmath>

#include "prodsv/ensembles.hpp"
#include "prodsv/linearization.hpp"
#include "prodsv/spectra.hpp"

namespace {

prodsv::TranslatedLinearization instance(std::size_t n, std::size_t m) {
  prodsv::EnsembleSpec spec;
  spec.n = n;
  spec.factors = m;
  const auto chain = prodsv::sample_chain(spec, prodsv::SeedStream(42));
  return {chain, std::polar(std::sqrt(static_cast<double>(n)), 0.7)};
}

prodsv::BlockVector rhs(std::size_t m, std::size_t n) {
  prodsv::SeedStream s(7);
  prodsv::BlockVector w(m, n);
  for (Eigen::Index i = 0; i < w.data().size(); ++i) w.data()(i) = s.complex_normal();
  return w;
}

void BM_StructuredSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const auto lin = instance(n, m);
  const auto w = rhs(m, n);
  for (auto _ : state) {
    const prodsv::StructuredSolver solver(lin);
    benchmark::DoNotOptimize(solver.solve(w));
  }
}

void BM_DenseSolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const auto lin = instance(n, m);
  const auto w = rhs(m, n);
  for (auto _ : state) {
    const prodsv::ComplexMatrix y = prodsv::materialize(lin);
    benchmark::DoNotOptimize(y.partialPivLu().solve(w.data()));
  }
}

void BM_ShiftInvertSigmaMin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const auto lin = instance(n, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prodsv::smallest_singular_value(lin, prodsv::SvdMethod::shift_invert).value);
  }
}

void BM_DenseSigmaMin(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto m = static_cast<std::size_t>(state.range(1));
  const auto lin = instance(n, m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(prodsv::smallest_singular_value(lin, prodsv::SvdMethod::dense).value);
  }
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {50, 100, 200}) {
    for (int m : {2, 4}) b->Args({n, m});
  }
}

}  // namespace

BENCHMARK(BM_StructuredSolve)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_DenseSolve)->Apply(sizes)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ShiftInvertSigmaMin)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseSigmaMin)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
