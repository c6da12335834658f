#include <benchmark/benchmark.h>

#include <random>

#include "pxlap/densities.hpp"
#include "pxlap/kernels.hpp"

using namespace pxlap;

namespace {

std::vector<double> noise(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void gradient(benchmark::State& state) {
  const Grid g = Grid::square_nodes(0.0, 1.0, static_cast<int>(state.range(0)));
  const Mesh mesh(g);
  const auto u = noise(g.size());
  const auto pe = kernels::element_exponents(mesh, std::vector<double>(g.size(), 1.7));
  std::vector<double> grad(g.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::energy_gradient(mesh, u, pe, PowerDensity{}, std::span<double>(grad));
    } else {
      kernels::serial::energy_gradient(mesh, u, pe, PowerDensity{}, std::span<double>(grad));
    }
    benchmark::DoNotOptimize(grad.data());
  }
}

template <bool Parallel>
void infconv(benchmark::State& state) {
  const Grid g = Grid::square_nodes(0.0, 1.0, static_cast<int>(state.range(0)));
  auto u = noise(g.size());
  for (auto& x : u) x *= 0.05;
  std::vector<double> out(g.size());
  std::vector<std::size_t> arg(g.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::omp::inf_convolve(g, u, 0.1, 2.0, out, arg);
    } else {
      kernels::serial::inf_convolve(g, u, 0.1, 2.0, out, arg);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(gradient<false>)->Name("energy_gradient/serial")->Arg(129)->Arg(257);
BENCHMARK(gradient<true>)->Name("energy_gradient/omp")->Arg(129)->Arg(257);
BENCHMARK(infconv<false>)->Name("inf_convolve/serial")->Arg(33)->Arg(65);
BENCHMARK(infconv<true>)->Name("inf_convolve/omp")->Arg(33)->Arg(65);

BENCHMARK_MAIN();
