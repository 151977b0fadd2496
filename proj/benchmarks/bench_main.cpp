#include <benchmark/benchmark.h>

#include <cmath>
#include <span>

#include "wdl/field.hpp"
#include "wdl/levy.hpp"
#include "wdl/limit.hpp"
#include "wdl/schrodinger.hpp"
#include "wdl/spectrum.hpp"
#include "wdl/wigner.hpp"

using namespace wdl;

namespace {

WaveField packet(const Grid& g, const ScalingRegime& r) {
  const double z = 0.3;
  return initial_condition(GaussianPacket{}, std::span<const double>(&z, 1), r, g);
}

void BM_ModeAdvance(benchmark::State& state) {
  const Grid g{1, static_cast<std::size_t>(state.range(0)), 80.0};
  ModeSet modes = ModeSet::build(ModelParams{}, g, 1.0, 1);
  for (auto _ : state) {
    modes.advance(1e-3);
    benchmark::DoNotOptimize(modes.states().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(modes.size()));
}
BENCHMARK(BM_ModeAdvance)->Arg(512)->Arg(4096);

void BM_Evaluate(benchmark::State& state) {
  const Grid g{1, static_cast<std::size_t>(state.range(0)), 80.0};
  const ModeSet modes = ModeSet::build(ModelParams{}, g, 1.0, 2);
  std::vector<double> v;
  for (auto _ : state) {
    evaluate(modes, v);
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(BM_Evaluate)->Arg(512)->Arg(4096);

void BM_SplitStep(benchmark::State& state) {
  const Grid g{1, static_cast<std::size_t>(state.range(0)), 80.0};
  const ScalingRegime r{0.1, 0.8, 0.4};
  const ModelParams params;
  WaveField f = packet(g, r);
  StochasticPotential v(ModeSet::build(params, g, r.wave_scale(), 3));
  Propagator p(g, r, params, 1e-3);
  for (auto _ : state) p.step(f, v);
}
BENCHMARK(BM_SplitStep)->Arg(1024)->Arg(4096);

void BM_Wigner(benchmark::State& state) {
  const Grid g{1, static_cast<std::size_t>(state.range(0)), 40.0};
  const WaveField f = packet(g, ScalingRegime{0.1, 0.8, 0.4});
  WignerOptions opt;
  opt.x_stride = 4;
  for (auto _ : state) benchmark::DoNotOptimize(wigner_transform(f, opt));
}
BENCHMARK(BM_Wigner)->Arg(512)->Arg(2048);

void BM_FracDiffusion(benchmark::State& state) {
  PhaseGrid pg;
  pg.nx = 64;
  pg.dx = 0.5;
  pg.x0 = -16.0;
  pg.x_period = 32.0;
  pg.nk = static_cast<std::size_t>(state.range(0));
  pg.dk = 0.1;
  pg.k0 = -0.05 * static_cast<double>(pg.nk);
  auto w0 = WignerGrid::zeros(pg);
  for (std::size_t i = 0; i < pg.nx; ++i)
    for (std::size_t j = 0; j < pg.nk; ++j) {
      const double x = pg.x0 + pg.dx * static_cast<double>(i);
      const double k = pg.k0 + pg.dk * static_cast<double>(j);
      w0.at(i, j) = std::exp(-0.5 * x * x - k * k);
    }
  for (auto _ : state) benchmark::DoNotOptimize(frac_diffusion_evolve(w0, 1.6, 0.5, 0.5));
}
BENCHMARK(BM_FracDiffusion)->Arg(256)->Arg(1024);

void BM_LevyEndpoint(benchmark::State& state) {
  const JumpKernel kernel(ModelParams{});
  const LevySampler sampler(kernel, 1e-6);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.endpoint(0.5, 9, i++));
}
BENCHMARK(BM_LevyEndpoint);

}  // namespace
BENCHMARK_MAIN();
