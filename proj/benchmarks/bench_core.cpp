// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>

#include "kppvar/cell_problem.hpp"
#include "kppvar/eigen.hpp"
#include "kppvar/pde.hpp"
#include "kppvar/shear.hpp"
#include "kppvar/speed.hpp"

using namespace kppvar;

namespace {

ShearPath make_path(int nodes, std::uint64_t seed = 1) {
  const Grid grid = Grid::uniform(1.0, nodes);
  RandomStream stream = realization_stream(seed, 0);
  return sample_ou_path(OUParams::create(4.0, 4.0, 1.0), grid, stream);
}

void BM_sample_ou_path(benchmark::State& state) {
  const Grid grid = Grid::uniform(1.0, static_cast<int>(state.range(0)));
  const OUParams params = OUParams::create(4.0, 4.0, 1.0);
  std::uint64_t index = 0;
  for (auto _ : state) {
    RandomStream stream = realization_stream(7, index++);
    benchmark::DoNotOptimize(sample_ou_path(params, grid, stream));
  }
}
BENCHMARK(BM_sample_ou_path)->Arg(101)->Arg(201)->Arg(501);

void BM_exact_ou_sample(benchmark::State& state) {
  const Grid grid = Grid::uniform(1.0, static_cast<int>(state.range(0)));
  const OUParams params = OUParams::create(4.0, 4.0, 1.0);
  std::uint64_t index = 0;
  for (auto _ : state) {
    RandomStream stream = realization_stream(7, index++);
    benchmark::DoNotOptimize(exact_ou_sample(params, grid, stream));
  }
}
BENCHMARK(BM_exact_ou_sample)->Arg(201)->Arg(501);

void BM_cell_problem(benchmark::State& state) {
  const ShearPath path = make_path(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_cell_problem(path.grid, path.fluctuation));
}
BENCHMARK(BM_cell_problem)->Arg(201)->Arg(501);

void BM_principal_eigenpair(benchmark::State& state) {
  const ShearPath path = make_path(static_cast<int>(state.range(0)));
  const auto op = assemble_operator(path, 0.9, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(op));
}
BENCHMARK(BM_principal_eigenpair)->Arg(101)->Arg(201)->Arg(501);

void BM_minimal_speed(benchmark::State& state) {
  const ShearPath path = make_path(201);
  const double delta = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(minimal_speed(path, delta, 1.0));
}
BENCHMARK(BM_minimal_speed)->Arg(1)->Arg(10)->Arg(50);

void BM_pde_step(benchmark::State& state) {
  const ShearPath path = make_path(21);
  PdeParams params;
  FrontState front;
  front.cross_section = path.grid;
  front.dx = params.dx;
  front.nx = static_cast<int>(std::lround(params.window_length / params.dx)) + 1;
  front.kappa = params.kappa;
  front.delta = 0.5;
  front.shear = path.values;
  front.field.assign(static_cast<std::size_t>(path.grid.nodes) * front.nx, 0.0);
  for (int iy = 0; iy < path.grid.nodes; ++iy)
    for (int ix = 0; ix < front.nx; ++ix)
      front.at(iy, ix) = 0.5 * (1.0 - std::tanh((ix * params.dx - 8.0) / 0.2));
  const Nonlinearity nl = Nonlinearity::kpp();
  for (auto _ : state) step(front, nl, params.dt);
  state.SetItemsProcessed(state.iterations() * front.field.size());
}
BENCHMARK(BM_pde_step);

}  // namespace

BENCHMARK_MAIN();
