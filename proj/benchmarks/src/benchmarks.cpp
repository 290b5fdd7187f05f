// Microbenchmarks for the numeric kernels on the hot path: matrix products,
// network forward/backward passes, a full training epoch, and PCA. Run with
// --benchmark_min_time=... to trade precision for wall time.

#include <diabnet/dataset.hpp>
#include <diabnet/matrix.hpp>
#include <diabnet/model.hpp>
#include <diabnet/pca.hpp>
#include <diabnet/rng.hpp>
#include <diabnet/training.hpp>

#include <benchmark/benchmark.h>

#include <cstddef>
#include <string>
#include <vector>

namespace {

using diabnet::Matrix;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    diabnet::Rng rng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = 2.0 * rng.next_double() - 1.0;
    return m;
}

/// Balanced random dataset shaped like the balanced training split.
diabnet::Dataset random_dataset(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    diabnet::Dataset ds;
    for (std::size_t c = 0; c < cols; ++c) {
        ds.schema.feature_names.push_back("f" + std::to_string(c + 1));
    }
    ds.schema.target_name = "y";
    ds.schema.positive_label = "1";
    ds.features = random_matrix(rows, cols, seed);
    ds.labels.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) ds.labels[r] = r % 2 == 0 ? 1 : 0;
    return ds;
}

diabnet::Model reference_model(std::size_t input_dim) {
    diabnet::ModelConfig config;
    config.input_dim = input_dim;
    config.hidden_sizes = {64, 32, 16};
    config.seed = 7;
    return diabnet::build(config);
}

void BM_Matmul(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(n, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    for (auto _ : state) {
        Matrix c = diabnet::matmul(a, b);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

void BM_ForwardInfer(benchmark::State& state) {
    const auto batch_rows = static_cast<std::size_t>(state.range(0));
    const diabnet::Model model = reference_model(8);
    const Matrix batch = random_matrix(batch_rows, 8, 3);
    for (auto _ : state) {
        Matrix probs = diabnet::forward_infer(model, batch);
        benchmark::DoNotOptimize(probs.data().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * batch_rows);
}
BENCHMARK(BM_ForwardInfer)->Arg(16)->Arg(108)->Arg(428);

void BM_ForwardBackward(benchmark::State& state) {
    const auto batch_rows = static_cast<std::size_t>(state.range(0));
    diabnet::Model model = reference_model(8);
    const Matrix batch = random_matrix(batch_rows, 8, 4);
    std::vector<int> labels(batch_rows);
    for (std::size_t r = 0; r < batch_rows; ++r) labels[r] = r % 2 == 0 ? 1 : 0;
    for (auto _ : state) {
        diabnet::ForwardCache cache;
        diabnet::forward(model, batch, diabnet::ForwardMode::Train, &cache);
        diabnet::Gradients grads = diabnet::backward(model, cache, labels);
        benchmark::DoNotOptimize(&grads);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * batch_rows);
}
BENCHMARK(BM_ForwardBackward)->Arg(16)->Arg(64);

void BM_TrainEpoch(benchmark::State& state) {
    const diabnet::Dataset train_set = random_dataset(428, 8, 5);
    diabnet::TrainConfig config;
    config.epochs = 1;
    config.batch_size = 16;
    config.seed = 11;
    for (auto _ : state) {
        state.PauseTiming();
        diabnet::Model model = reference_model(8); // fresh weights each epoch
        state.ResumeTiming();
        diabnet::TrainHistory history = diabnet::train(model, train_set, config);
        benchmark::DoNotOptimize(history.losses.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * train_set.rows());
}
BENCHMARK(BM_TrainEpoch);

void BM_PcaFitProject(benchmark::State& state) {
    const diabnet::Dataset ds = random_dataset(536, 8, 6);
    for (auto _ : state) {
        diabnet::PcaResult result = diabnet::pca_fit_project(ds, 2);
        benchmark::DoNotOptimize(result.projection.data().data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * ds.rows());
}
BENCHMARK(BM_PcaFitProject);

} // namespace

BENCHMARK_MAIN();
