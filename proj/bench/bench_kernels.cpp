// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "qplas/scan.hpp"

using namespace qplas;

namespace {

const StirapSystem& fig6_system() {
  static const StirapSystem sys = [] {
    std::array<EmitterSpec, 2> e;
    e[0].distance_nm = 2.0;
    e[1].distance_nm = 4.0;
    const auto grid = linear_grid(2.0, 3.0, 4001);
    return make_system(NanoparticleModel{}, e, 25, grid, 0.1);
  }();
  return sys;
}

StirapSettings fig6_settings() {
  StirapSettings s;
  s.width_T = units::ns_to_internal(10.0);
  return s;
}

const std::vector<double> kPhis = linear_grid(0.0, 3.14159265358979, 8);
const std::vector<double> kAreas = linear_grid(20.0, 140.0, 4);

void BM_ScanSerial(benchmark::State& state) {
  const auto& sys = fig6_system();
  const auto s = fig6_settings();
  for (auto _ : state) benchmark::DoNotOptimize(scan_angle_area_serial(sys, 25, kPhis, kAreas, s));
}

void BM_ScanParallel(benchmark::State& state) {
  const auto& sys = fig6_system();
  const auto s = fig6_settings();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scan_angle_area(sys, 25, kPhis, kAreas, s));
}

void BM_SpectrumSerial(benchmark::State& state) {
  const auto grid = linear_grid(2.0, 3.0, 20001);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        coupling_spectrum_serial(NanoparticleModel{}, EmitterSpec{}, 7, grid, 0.1));
}

void BM_SpectrumParallel(benchmark::State& state) {
  const auto grid = linear_grid(2.0, 3.0, 20001);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(coupling_spectrum(NanoparticleModel{}, EmitterSpec{}, 7, grid, 0.1));
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectrumParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
