// Serial reference kernels against the OpenMP / phasor-recurrence versions.
// Set OMP_NUM_THREADS to compare thread counts.

#include <map>

#include <benchmark/benchmark.h>

#include "qid/kernels.hpp"
#include "qid/models.hpp"

namespace {

using namespace qid;

const Sample& sample_of(std::size_t n)
{
  static std::map<std::size_t, Sample> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, sample_model(TwoNormalMixture{ 0.75, 0.1, 0.5 }, n, 7)).first;
  return it->second;
}

template<auto Kernel>
void bm_ecf(benchmark::State& state)
{
  const auto& s = sample_of(static_cast<std::size_t>(state.range(0)));
  const UniformGrid u(0.0, 8.0, 4096);
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(s.values, u));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 4096);
}

template<auto Kernel>
void bm_kde(benchmark::State& state)
{
  const auto& s = sample_of(static_cast<std::size_t>(state.range(0)));
  const UniformGrid t(-6.0, 6.0, 2001);
  const double h = bandwidth_rule(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(s.values, h, t));
}

template<auto Kernel>
void bm_inverse(benchmark::State& state)
{
  const UniformGrid u(0.0, 8.0, 2048);
  std::vector<complex> psi(u.count());
  for (std::size_t k = 0; k < psi.size(); ++k)
    psi[k] = std::exp(-0.5 * u.node(k) * u.node(k));
  const UniformGrid x(-6.0, 6.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(psi, u, x));
}

} // namespace

BENCHMARK(bm_ecf<kernels::serial::ecf>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ecf<kernels::parallel::ecf>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_kde<kernels::serial::kde>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_kde<kernels::parallel::kde>)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_inverse<kernels::serial::hermitian_inverse>)->Arg(801)->Arg(2001)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_inverse<kernels::parallel::hermitian_inverse>)->Arg(801)->Arg(2001)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
