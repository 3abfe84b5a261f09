#include <benchmark/benchmark.h>

#include <random>

#include "twofold/datagen.hpp"
#include "twofold/graph_learn.hpp"
#include "twofold/smoothers.hpp"
#include "twofold/unrolled.hpp"

using namespace twofold;

namespace {

Matrix random_signal(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix X(rows, cols);
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            X(i, j) = normal(rng);
        }
    }
    return X;
}

datagen::DatasetPair desk_pair() {
    datagen::SynthConfig cfg;
    cfg.sigma = 0.2;
    cfg.seed = 42;
    return datagen::gen_multimodal(cfg);
}

void bm_pairwise_sq_dists(benchmark::State& state) {
    const Matrix X = random_signal(static_cast<int>(state.range(0)), 80, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pairwise_sq_dists(X));
    }
}
BENCHMARK(bm_pairwise_sq_dists)->Arg(80)->Arg(120);

void bm_pds_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix X = random_signal(n, 80, 2);
    const learn::LearnParams p{0.5, 0.5, 0.5};
    const auto settings = learn::PdsSettings::for_unrolled();
    for (auto _ : state) {
        benchmark::DoNotOptimize(learn::pds_solve(X, p, settings));
    }
}
BENCHMARK(bm_pds_solve)->Arg(80)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_tikhonov_solve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto pair = desk_pair();
    const Matrix X = n == 80 ? pair.Y : Matrix(pair.Y.transpose());
    const Laplacian L = build_laplacian(n == 80 ? *pair.gt_spatial : *pair.gt_modality);
    for (auto _ : state) {
        benchmark::DoNotOptimize(smoothers::tikhonov_solve(L, X, 0.5));
    }
}
BENCHMARK(bm_tikhonov_solve)->Arg(80)->Arg(120)->Unit(benchmark::kMillisecond);

void bm_eigendecompose(benchmark::State& state) {
    const auto pair = desk_pair();
    const Laplacian L = build_laplacian(*pair.gt_spatial);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigendecompose(L));
    }
}
BENCHMARK(bm_eigendecompose)->Unit(benchmark::kMillisecond);

void bm_forward_layer(benchmark::State& state) {
    const auto pair = desk_pair();
    const auto sched = unrolled::HyperSchedule::constant_init(1, 0.5);
    const auto pds = learn::PdsSettings::for_unrolled();
    for (auto _ : state) {
        benchmark::DoNotOptimize(unrolled::forward(pair.Y, sched, pds, {false, false}));
    }
}
BENCHMARK(bm_forward_layer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
