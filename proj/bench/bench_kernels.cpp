// Serial reference vs OpenMP path for the heavy kernels. Arg 0: serial, 1: parallel.
#include <benchmark/benchmark.h>

#include "landau/dispersion.hpp"
#include "landau/freestream.hpp"
#include "landau/green_function.hpp"
#include "landau/nonlinear.hpp"

using namespace landau;

namespace {

Exec mode(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

FieldIterate decaying_field() {
  TimeGrid grid = TimeGrid::from_range(0.0, 20.0, 0.01);
  FieldIterate E = FieldIterate::zero(grid, 0.36, 3);
  for (int j = 0; j < grid.n; ++j) {
    E.modes[1][j] = 1e-3 * std::exp(-0.5 * grid.t(j)) * cplx(1.0, 0.2);
    E.modes[-1][j] = std::conj(E.modes[1][j]);
  }
  E.norm = weighted_norm(E);
  return E;
}

void BM_find_roots(benchmark::State& st) {
  FindOptions fo;
  fo.exec = mode(st);
  auto spec = EquilibriumSpec::maxwellian(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(find_roots(spec, SearchRegion::symmetric(4), fo));
}

void BM_freestream_field(benchmark::State& st) {
  FreestreamOptions fo;
  fo.exec = mode(st);
  auto g = PerturbationSpec::cosine(1e-3, 2, VelocityProfile::lorentzian(1.0 / pi), 0.5);
  std::vector<double> t;
  for (int k = 0; k < 200; ++k) t.push_back(0.1 * k);
  for (auto _ : st) benchmark::DoNotOptimize(freestream_field(g, 64, t, fo));
}

void BM_green_table(benchmark::State& st) {
  GreenConfig cfg;
  cfg.nu0 = 0.4;
  cfg.exec = mode(st);
  auto G = std::make_shared<GreenKernel>(EquilibriumSpec::maxwellian(1.0), cfg);
  std::vector<double> slices;
  for (int k = 1; k <= 16; ++k) slices.push_back(-0.5 * k);
  for (auto _ : st) benchmark::DoNotOptimize(build_Qz(G, slices, 1024));
}

void BM_characteristics(benchmark::State& st) {
  FieldIterate E = decaying_field();
  std::vector<double> t{0.0, 1.0, 2.0, 4.0}, z = uniform_z_grid(8), w;
  for (int k = -40; k <= 40; ++k) w.push_back(0.1 * k);
  for (auto _ : st) benchmark::DoNotOptimize(compute_endpoints(E, t, z, w, {}, mode(st)));
}

void BM_source_L(benchmark::State& st) {
  FieldIterate E = decaying_field();
  LTable tab(PerturbationSpec::cosine(1e-3, 1, VelocityProfile::gaussian(), 1.0), E.grid.h);
  for (auto _ : st) benchmark::DoNotOptimize(source_L_modes(tab, E, 1e-2, 3, mode(st)));
}

}  // namespace

BENCHMARK(BM_find_roots)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_freestream_field)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_green_table)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_characteristics)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_source_L)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
