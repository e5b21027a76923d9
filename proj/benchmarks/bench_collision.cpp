#include <benchmark/benchmark.h>

#include "qkinetic/collision.hpp"
#include "qkinetic/diagnostics.hpp"
#include "qkinetic/solver.hpp"

using namespace qkinetic;

namespace {

struct Setup {
  Grids grids;
  CollisionOperator op;
  DistributionField F;

  explicit Setup(int n, double delta = 1.0)
      : grids(build_grids(GridConfig{6.0, n, 4, 8})),
        op(params(delta), grids.velocity, grids.sphere),
        F(make_bump_data(BumpSpec{}, op.tables(), grids.velocity, grids.space)) {}

  static ModelParams params(double delta) {
    ModelParams p;
    p.delta = delta;
    return p;
  }
};

void BM_CollisionOperator(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(s.op.evaluate(s.F, 0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.grids.velocity.size()));
}
BENCHMARK(BM_CollisionOperator)->Arg(7)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

void BM_GammaDelta(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)));
  const PerturbationField f = to_perturbation(s.F, s.op.tables());
  for (auto _ : state) benchmark::DoNotOptimize(s.op.gamma_delta(f, 0));
}
BENCHMARK(BM_GammaDelta)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_OperatorConstruction(benchmark::State& state) {
  const Grids g = build_grids(GridConfig{6.0, static_cast<int>(state.range(0)), 4, 8});
  for (auto _ : state) {
    CollisionOperator op(ModelParams{}, g.velocity, g.sphere);
    benchmark::DoNotOptimize(op.nu().data());
  }
}
BENCHMARK(BM_OperatorConstruction)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_PicardWindow(benchmark::State& state) {
  Setup s(7);
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.substeps = 3;
  const PicardSolver solver(s.op, s.grids.space, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve_window(s.F, Window{0.0, 0.02}));
}
BENCHMARK(BM_PicardWindow)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
