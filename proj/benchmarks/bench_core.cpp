#include <random>

#include <benchmark/benchmark.h>

#include "glthermo/energy.hpp"
#include "glthermo/landau.hpp"
#include "glthermo/minimize.hpp"
#include "glthermo/torus_solver.hpp"

namespace {

using namespace glthermo;

OrderParameter random_field(const GridSpec& g, unsigned seed) {
  OrderParameter u = OrderParameter::zeros(g);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.5);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = {n(rng), n(rng)};
  for (int j = 0; j <= g.points_per_side; ++j)
    for (int i = 0; i <= g.points_per_side; ++i)
      if (g.bc == Boundary::dirichlet && is_boundary_node(g, i, j)) u.values[node_index(g, i, j)] = 0.0;
  return u;
}

void energy_gradient_2d(benchmark::State& state) {
  GridSpec g = make_dirichlet_grid(2, static_cast<double>(state.range(0)), 0.25);
  GaugeLinks links = build_gauge_links(g);
  OrderParameter u = random_field(g, 1);
  Field grad(u.values.size());
  for (auto _ : state) {
    EnergyBreakdown e = energy_kernel(links, 0.5, u.values.data(), grad.data());
    benchmark::DoNotOptimize(e.total);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.node_count()));
}
BENCHMARK(energy_gradient_2d)->Arg(8)->Arg(16)->Arg(32);

void torus_solve(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  GridSpec g = make_periodic_grid(N, 0.25);
  MagneticTorusSolver solver(g.points_per_side, g.spacing, N, kinetic_scale(g.spacing), 0.5, {1.0});
  OrderParameter u = random_field(g, 2);
  for (auto _ : state) {
    Field x = u.values;
    solver.solve(x.data());
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.node_count()));
}
BENCHMARK(torus_solve)->Arg(4)->Arg(16)->Arg(64);

void landau_band(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) {
    LandauBand band = lowest_band(N, 0.25, N + 1);
    benchmark::DoNotOptimize(band.eigenvalues.data());
  }
}
BENCHMARK(landau_band)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void minimize_dirichlet(benchmark::State& state) {
  MinimizeOptions opt;
  opt.restarts = 1;
  for (auto _ : state) {
    MinimizeResult r = minimize_dirichlet_2d(0.5, static_cast<double>(state.range(0)), 0.25, opt);
    benchmark::DoNotOptimize(r.energy);
  }
}
BENCHMARK(minimize_dirichlet)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
