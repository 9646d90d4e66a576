// Parallel kernels against the serial reference implementation.
//
//   OMP_NUM_THREADS=4 ./bench_ops --benchmark_filter=div_up

#include <benchmark/benchmark.h>

#include <random>

#include "vfv/experiments.hpp"
#include "vfv/ops.hpp"
#include "vfv/scheme.hpp"

namespace {

struct Fixture {
  vfv::Mesh mesh;
  vfv::ScalarField r;
  vfv::VectorField u;
  vfv::ops::FluxParams fp;

  explicit Fixture(int k) : mesh(k, 2), r(mesh), u(mesh), fp(0.5, mesh.h()) {
    std::mt19937_64 g(7);
    for (double& v : r.values()) v = 0.5 + static_cast<double>(g() >> 11) * 0x1.0p-53;
    for (double& v : u.data()) v = static_cast<double>(g() >> 11) * 0x1.0p-53 - 0.5;
  }
};

void div_up_parallel(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vfv::ops::div_up(f.r, f.u, f.fp));
}

void div_up_serial(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vfv::ops::serial::div_up(f.r, f.u, f.fp));
}

void viscous_parallel(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vfv::ops::viscous_term(f.u, 0.01, 0.003));
}

void viscous_serial(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(vfv::ops::serial::viscous_term(f.u, 0.01, 0.003));
}

void implicit_step(benchmark::State& state) {
  const vfv::Mesh mesh(static_cast<int>(state.range(0)), 2);
  vfv::SchemeParams p;
  p.a = 2.5;
  const vfv::State s = vfv::make_initial_state(vfv::draw_kh_params(1), mesh);
  const vfv::Stepper stepper(mesh, p);
  for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s, stepper.time_step(s)));
}

}  // namespace

BENCHMARK(div_up_parallel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(div_up_serial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(viscous_parallel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(viscous_serial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(implicit_step)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
