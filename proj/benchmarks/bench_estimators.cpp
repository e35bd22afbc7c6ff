#include "gcm/estimators.hpp"
#include "gcm/inference.hpp"
#include "gcm/mc.hpp"
#include "gcm/model.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace gcm;

namespace {

Dataset make_dataset(int r, int p) {
    std::vector<double> times(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) times[static_cast<std::size_t>(i)] = i + 1.0;
    const Design design = potthoff_roy_design(3, r, times, 2);
    Matrix theta(3, 2);
    theta << 1.0, 0.5, 2.0, 0.8, 1.5, -0.3;
    Matrix sigma = Matrix::Constant(p, p, 0.3);
    sigma.diagonal().array() += 1.0;
    return simulate(design, ModelParams{theta, SpdMatrix(sigma)}, NoiseSpec{}, 1);
}

void BM_TwoStageGammaSolve(benchmark::State& state) {
    const Dataset d = make_dataset(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    const Contrast c = equality_contrast(3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(two_stage_gamma(d, c));
}
BENCHMARK(BM_TwoStageGammaSolve)->Args({20, 4})->Args({250, 4})->Args({250, 16});

void BM_TwoStageThetaHMatrix(benchmark::State& state) {
    const Dataset d = make_dataset(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(two_stage_theta(d));
}
BENCHMARK(BM_TwoStageThetaHMatrix)->Args({20, 4})->Args({250, 4})->Args({250, 16});

void BM_TestGammaZero(benchmark::State& state) {
    const Dataset d = make_dataset(static_cast<int>(state.range(0)), 4);
    const Contrast c = equality_contrast(3, 2);
    for (auto _ : state) benchmark::DoNotOptimize(test_gamma_zero(d, c, 0.05));
}
BENCHMARK(BM_TestGammaZero)->Arg(20)->Arg(250);

void BM_SimulateErrors(benchmark::State& state) {
    Matrix sigma = Matrix::Constant(4, 4, 0.3);
    sigma.diagonal().array() += 1.0;
    const SpdMatrix s(sigma);
    const auto family = static_cast<NoiseFamily>(state.range(1));
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_errors(state.range(0), s, NoiseSpec{family, 6.0}, ++seed));
}
BENCHMARK(BM_SimulateErrors)->Args({500, 0})->Args({500, 1})->Args({500, 2});

void BM_McReplicate(benchmark::State& state) {
    mc::McConfig cfg;
    cfg.scenario.design = {2, {1, 2, 3, 4}, 2};
    cfg.scenario.theta.resize(2, 2);
    cfg.scenario.theta << 1.0, 0.5, 2.0, 0.5;
    cfg.scenario.sigma = Matrix::Constant(4, 4, 0.3);
    cfg.scenario.sigma.diagonal().array() += 1.0;
    cfg.sample_sizes = {static_cast<int>(state.range(0))};
    cfg.replications = 100;
    int i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(mc::run_replicate(cfg, 0, i++));
}
BENCHMARK(BM_McReplicate)->Arg(20)->Arg(250);

}  // namespace

BENCHMARK_MAIN();
