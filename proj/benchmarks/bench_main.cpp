#include <benchmark/benchmark.h>

#include "panelfuse/panelfuse.hpp"

using namespace panelfuse;

namespace {

SimulatedInstance instance(benchmark::State& state) {
    const auto n = static_cast<Index>(state.range(0));
    return gen_dgp2(n, n, ErrorSpec::homoscedastic(0.5), 11);
}

}  // namespace

static void BM_ProxScad(benchmark::State& state) {
    Eigen::VectorXd w(2);
    w << 0.7, -1.1;
    const auto spec = PenaltySpec::make(PenaltyKind::SCAD, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prox(w, spec, 1.0));
    }
}
BENCHMARK(BM_ProxScad);

static void BM_FusedUpdate(benchmark::State& state) {
    const auto inst = instance(state);
    const auto design = build_design(inst.panel);
    const auto idx = build_fusion_index(inst.panel.n_individuals(), inst.panel.n_periods());
    const auto s = FusedState::from_coefficients(ridge_init(inst.panel, design, RidgeConfig{}), idx);
    const auto spec = PenaltySpec::make(PenaltyKind::SCAD, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(update_fused(s, idx, spec, spec, AdmmConfig{}));
    }
    state.SetItemsProcessed(state.iterations() * (static_cast<std::int64_t>(idx.individual_pairs.size() + idx.period_pairs.size())));
}
BENCHMARK(BM_FusedUpdate)->Arg(20)->Arg(40);

static void BM_SolveKrylov(benchmark::State& state) {
    const auto inst = instance(state);
    const auto design = build_design(inst.panel);
    const NormalSystem system(design, 1.0, 1.0);
    const Eigen::MatrixXd rhs = design_cross_outcome(design, inst.panel.outcomes());
    for (auto _ : state) {
        benchmark::DoNotOptimize(system.solve(rhs));
    }
    state.counters["cg_iterations"] = NormalSystem::last_iterations();
}
BENCHMARK(BM_SolveKrylov)->Arg(10)->Arg(20)->Arg(40);

static void BM_SolveDense(benchmark::State& state) {
    const auto inst = instance(state);
    const auto design = build_design(inst.panel);
    LinearSolverOptions opt;
    opt.kind = LinearSolver::DenseFallback;
    const NormalSystem system(design, 1.0, 1.0, opt);
    const Eigen::MatrixXd rhs = design_cross_outcome(design, inst.panel.outcomes());
    for (auto _ : state) {
        benchmark::DoNotOptimize(system.solve(rhs));
    }
}
BENCHMARK(BM_SolveDense)->Arg(10)->Arg(20);

// one ADMM iteration per benchmark iteration
static void BM_AdmmIteration(benchmark::State& state) {
    const auto inst = instance(state);
    const auto design = build_design(inst.panel);
    const auto idx = build_fusion_index(inst.panel.n_individuals(), inst.panel.n_periods());
    const auto init = ridge_init(inst.panel, design, RidgeConfig{});
    const auto spec = PenaltySpec::make(PenaltyKind::SCAD, 0.5);
    AdmmConfig cfg;
    cfg.max_iterations = 1;
    const NormalSystem system(design, cfg.psi, cfg.phi);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_admm(inst.panel, design, idx, spec, spec, cfg, init, system));
    }
}
BENCHMARK(BM_AdmmIteration)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_RecoverBlocks(benchmark::State& state) {
    const auto inst = instance(state);
    const auto idx = build_fusion_index(inst.panel.n_individuals(), inst.panel.n_periods());
    const auto s = FusedState::from_coefficients(inst.true_beta, idx);
    for (auto _ : state) {
        benchmark::DoNotOptimize(recover_blocks(s, idx));
    }
}
BENCHMARK(BM_RecoverBlocks)->Arg(20)->Arg(40);
BENCHMARK_MAIN();
