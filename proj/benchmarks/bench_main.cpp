// Microbenchmarks for the hot paths: rasterization/condensing of the
// paper-scale grid, and the exact solver at several budgets.

#include <benchmark/benchmark.h>

#include "depthalloc/config.hpp"
#include "depthalloc/hypograph.hpp"
#include "depthalloc/solver.hpp"

using namespace depthalloc;

namespace {

struct PaperScale {
    RunConfig cfg = scenario_config("unweighted_3mm_2m");
    Grid grid;
    KnollTrain train;

    PaperScale()
        : grid(Grid::make(cfg.train.d_min, cfg.train.d_max,
                          cfg.grid.depth_cols, cfg.grid.age_rows,
                          cfg.grid.height_bins, Measure::kDepth)),
          train(build_train(cfg.train.d_min, cfg.train.d_max,
                            cfg.train.spacing_d,
                            cfg.dof_table().dof_fwhm(cfg.pupil_mm), cfg.model,
                            grid)) {}
};

const PaperScale& paper_scale() {
    static const PaperScale ps;
    return ps;
}

const CondensedProblem& paper_condensed() {
    static const CondensedProblem cp = rasterize_condensed(
        paper_scale().train, paper_scale().grid, paper_scale().cfg.model);
    return cp;
}

void BM_RasterizeCondensed(benchmark::State& state) {
    const PaperScale& ps = paper_scale();
    for (auto _ : state) {
        CondensedProblem cp = rasterize_condensed(ps.train, ps.grid, ps.cfg.model);
        benchmark::DoNotOptimize(cp.m.rows());
    }
    state.SetItemsProcessed(state.iterations() * ps.grid.pixel_count());
}
BENCHMARK(BM_RasterizeCondensed)->Unit(benchmark::kMillisecond);

void BM_TwoStageRasterize(benchmark::State& state) {
    const PaperScale& ps = paper_scale();
    for (auto _ : state) {
        CondensedMatrix c = condense(rasterize(ps.train, ps.grid));
        benchmark::DoNotOptimize(c.rows());
    }
}
BENCHMARK(BM_TwoStageRasterize)->Unit(benchmark::kMillisecond);

void BM_SolveExact(benchmark::State& state) {
    const CondensedProblem& cp = paper_condensed();
    AllocationProblem p;
    p.condensed = &cp.m;
    p.budget = static_cast<int>(state.range(0));
    p.total_weight = cp.m.total_weight();
    for (auto _ : state) {
        Selection s = solve_mbp(p);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(BM_SolveExact)->Arg(1)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_SolveLpRelaxation(benchmark::State& state) {
    const CondensedProblem& cp = paper_condensed();
    AllocationProblem p;
    p.condensed = &cp.m;
    p.budget = 9;
    p.total_weight = cp.m.total_weight();
    for (auto _ : state) {
        LpSolution lp = solve_lp(p);
        benchmark::DoNotOptimize(lp.objective);
    }
}
BENCHMARK(BM_SolveLpRelaxation)->Unit(benchmark::kMillisecond);

void BM_GreedyBaseline(benchmark::State& state) {
    const CondensedProblem& cp = paper_condensed();
    AllocationProblem p;
    p.condensed = &cp.m;
    p.budget = 9;
    p.total_weight = cp.m.total_weight();
    for (auto _ : state) {
        Selection s = greedy_select(p);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(BM_GreedyBaseline)->Unit(benchmark::kMillisecond);

void BM_IntrinsicError(benchmark::State& state) {
    AccommodationModel model;
    DofTable dof;
    for (auto _ : state) {
        double e = intrinsic_error(model, dof, 3.0, 0.5, 7.08);
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(BM_IntrinsicError)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
