// Serial reference path against the OpenMP path for one time step of each
// solver. Arguments are the cell count (per direction in 3-D).

#include <benchmark/benchmark.h>

#include "kcl/kcl2d.hpp"
#include "kcl/kcl3d.hpp"
#include "kcl/scalar_claw.hpp"
#include "kcl/scenario.hpp"

namespace {

using kcl::Exec;

void advance2(benchmark::State& st, Exec exec, kcl::Reconstruction rec) {
  kcl::ScenarioConfig c = kcl::default_config(kcl::Scenario::sinusoidal_shock);
  c.cells = static_cast<std::size_t>(st.range(0));
  const kcl::FrontSetup f = kcl::build_front(c);
  const kcl::Closure closure = kcl::init_closure(kcl::ClosureKind::wnlrt, f.state);
  kcl::StepOptions opt;
  opt.exec = exec;
  opt.reconstruction = rec;
  for (auto _ : st) benchmark::DoNotOptimize(kcl::advance(f.state, closure, opt));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void advance3(benchmark::State& st, Exec exec) {
  kcl::ScenarioConfig c = kcl::default_config(kcl::Scenario::periodic_pulse3d);
  c.cells = static_cast<std::size_t>(st.range(0));
  const kcl::SurfaceSetup s = kcl::build_surface(c);
  const kcl::Closure closure = kcl::init_closure(kcl::ClosureKind::wnlrt, s.state);
  kcl::Step3Options opt;
  opt.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(kcl::advance3(s.state, closure, opt));
  st.SetItemsProcessed(st.iterations() * st.range(0) * st.range(0));
}

void scalar_run(benchmark::State& st, Exec exec) {
  kcl::ScenarioConfig c = kcl::default_config(kcl::Scenario::burgers_riemann);
  c.cells = static_cast<std::size_t>(st.range(0));
  const kcl::ScalarSetup s = kcl::build_scalar(c);
  kcl::scalar::ScalarOptions opt;
  opt.exec = exec;
  for (auto _ : st) benchmark::DoNotOptimize(kcl::scalar::evolve_scalar(s.claw, s.grid, s.u, 0.05, opt));
}

}  // namespace

BENCHMARK_CAPTURE(advance2, serial_first_order, Exec::serial, kcl::Reconstruction::first_order)
    ->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(advance2, parallel_first_order, Exec::parallel, kcl::Reconstruction::first_order)
    ->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(advance2, serial_muscl, Exec::serial, kcl::Reconstruction::muscl)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(advance2, parallel_muscl, Exec::parallel, kcl::Reconstruction::muscl)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(advance3, serial, Exec::serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(advance3, parallel, Exec::parallel)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(scalar_run, serial, Exec::serial)->Arg(4000);
BENCHMARK_CAPTURE(scalar_run, parallel, Exec::parallel)->Arg(4000);

BENCHMARK_MAIN();
