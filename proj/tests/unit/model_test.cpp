#include <diabnet/errors.hpp>
#include <diabnet/model.hpp>
#include <diabnet/rng.hpp>

#include <doctest.h>

#include <cmath>
#include <vector>

using diabnet::Activation;
using diabnet::ForwardMode;
using diabnet::LayerKind;
using diabnet::Matrix;
using diabnet::Model;
using diabnet::ModelConfig;

namespace {

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    diabnet::Rng rng(seed);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.next_double() * 2.0 - 1.0;
    }
    return m;
}

std::vector<int> random_labels(std::size_t n, std::uint64_t seed) {
    diabnet::Rng rng(seed);
    std::vector<int> labels(n);
    for (int& label : labels) label = static_cast<int>(rng.below(2));
    return labels;
}

/// dense(W, b) -> softmax, for hand-computed cases.
Model toy_softmax_model(const Matrix& weights, const std::vector<double>& bias) {
    Model model;
    model.input_dim = weights.rows();
    model.layers.push_back(diabnet::Layer::make_dense({weights, bias}));
    model.layers.push_back(diabnet::Layer::make_activation(Activation::Softmax));
    return model;
}

} // namespace

TEST_CASE("build assembles dense->BN->activation blocks closed by dense->softmax") {
    const Model model = diabnet::build({8, {64, 32, 16}, Activation::Sigmoid, 2, 42});
    REQUIRE(model.layers.size() == 11);
    CHECK(model.input_dim == 8);

    const std::vector<std::pair<std::size_t, std::size_t>> dense_shapes = {
        {8, 64}, {64, 32}, {32, 16}, {16, 2}};
    std::size_t dense_seen = 0, bn_seen = 0;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        if (layer.kind == LayerKind::Dense) {
            CHECK(layer.dense.in_dim() == dense_shapes[dense_seen].first);
            CHECK(layer.dense.out_dim() == dense_shapes[dense_seen].second);
            for (double b : layer.dense.bias) CHECK(b == 0.0);
            ++dense_seen;
        } else if (layer.kind == LayerKind::BatchNorm) {
            for (double g : layer.batch_norm.gamma) CHECK(g == 1.0);
            for (double b : layer.batch_norm.beta) CHECK(b == 0.0);
            for (double m : layer.batch_norm.running_mean) CHECK(m == 0.0);
            for (double v : layer.batch_norm.running_var) CHECK(v == 1.0);
            CHECK(layer.batch_norm.epsilon == 1e-5);
            CHECK(layer.batch_norm.momentum == 0.1);
            ++bn_seen;
        }
    }
    CHECK(dense_seen == 4);
    CHECK(bn_seen == 3);

    // Final two layers: output projection then softmax; no BN on the output.
    CHECK(model.layers[9].kind == LayerKind::Dense);
    CHECK(model.layers[10].kind == LayerKind::Activation);
    CHECK(model.layers[10].activation.fn == Activation::Softmax);
    CHECK(model.layers[2].activation.fn == Activation::Sigmoid);

    // 4 dense layers + gamma/beta for the three BN layers.
    const std::size_t expected = (8 * 64 + 64) + (64 * 32 + 32) + (32 * 16 + 16) +
                                 (16 * 2 + 2) + 2 * (64 + 32 + 16);
    CHECK(diabnet::parameter_count(model) == expected);
}

TEST_CASE("build draws Glorot-uniform weights inside the fan bound") {
    const Model model = diabnet::build({8, {16, 8, 4}, Activation::Relu, 2, 7});
    for (const auto& layer : model.layers) {
        if (layer.kind != LayerKind::Dense) continue;
        const double bound =
            std::sqrt(6.0 / static_cast<double>(layer.dense.in_dim() + layer.dense.out_dim()));
        double max_abs = 0.0;
        for (std::size_t r = 0; r < layer.dense.weights.rows(); ++r) {
            for (std::size_t c = 0; c < layer.dense.weights.cols(); ++c) {
                max_abs = std::max(max_abs, std::abs(layer.dense.weights(r, c)));
            }
        }
        CHECK(max_abs <= bound);
        CHECK(max_abs > 0.0); // not silently zero-initialized
    }
}

TEST_CASE("build is seed-deterministic and seed-sensitive") {
    const ModelConfig config{8, {16, 8, 4}, Activation::Sigmoid, 2, 42};
    CHECK(diabnet::build(config) == diabnet::build(config));

    ModelConfig other = config;
    other.seed = 43;
    CHECK_FALSE(diabnet::build(config) == diabnet::build(other));
}

TEST_CASE("build rejects degenerate dimensions and softmax hidden activations") {
    CHECK_THROWS_AS(diabnet::build({0, {4}, Activation::Sigmoid, 2, 1}), diabnet::ConfigError);
    CHECK_THROWS_AS(diabnet::build({3, {4, 0}, Activation::Sigmoid, 2, 1}), diabnet::ConfigError);
    CHECK_THROWS_AS(diabnet::build({3, {4}, Activation::Softmax, 2, 1}), diabnet::ConfigError);
}

TEST_CASE("inference-mode BN applies gamma * (x - m) / sqrt(v) + beta") {
    diabnet::BatchNormLayer bn;
    bn.gamma = {2.0, 1.0, 0.5};
    bn.beta = {1.0, 0.0, -1.0};
    bn.running_mean = {0.5, -1.0, 2.0};
    bn.running_var = {4.0, 1.0, 0.25}; // sigmas 2, 1, 0.5 -- all above the eps guard

    Model model;
    model.input_dim = 3;
    model.layers.push_back(diabnet::Layer::make_batch_norm(bn));

    const Matrix batch = random_batch(4, 3, 99);
    const Matrix out = diabnet::forward_infer(model, batch);
    const double sigma[3] = {2.0, 1.0, 0.5};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            const double expected =
                bn.gamma[c] * (batch(r, c) - bn.running_mean[c]) / sigma[c] + bn.beta[c];
            CHECK(out(r, c) == doctest::Approx(expected).epsilon(1e-15));
        }
    }
}

TEST_CASE("train-mode BN normalizes each feature: mean 0, variance 1") {
    for (std::size_t batch_size : {std::size_t{2}, std::size_t{16}, std::size_t{32}}) {
        CAPTURE(batch_size);
        Model model = diabnet::build({8, {16, 8, 4}, Activation::Sigmoid, 2, 11});
        const Matrix batch = random_batch(batch_size, 8, 1000 + batch_size);

        diabnet::ForwardCache cache;
        diabnet::forward(model, batch, ForwardMode::Train, &cache);

        bool saw_bn = false;
        for (std::size_t i = 0; i < model.layers.size(); ++i) {
            if (model.layers[i].kind != LayerKind::BatchNorm) continue;
            saw_bn = true;
            const Matrix& normalized = cache.bn[i].normalized;
            REQUIRE(normalized.rows() == batch_size);
            for (std::size_t c = 0; c < normalized.cols(); ++c) {
                double mean = 0.0;
                for (std::size_t r = 0; r < batch_size; ++r) mean += normalized(r, c);
                mean /= static_cast<double>(batch_size);
                double var = 0.0;
                for (std::size_t r = 0; r < batch_size; ++r) {
                    const double delta = normalized(r, c) - mean;
                    var += delta * delta;
                }
                var /= static_cast<double>(batch_size);
                CHECK(std::abs(mean) < 1e-9);
                CHECK(std::abs(var - 1.0) < 1e-6);
            }
        }
        CHECK(saw_bn);
    }
}

TEST_CASE("train-mode forward updates running stats with momentum 0.1") {
    diabnet::BatchNormLayer bn;
    bn.gamma = {1.0};
    bn.beta = {0.0};
    bn.running_mean = {0.0};
    bn.running_var = {1.0};
    Model model;
    model.input_dim = 1;
    model.layers.push_back(diabnet::Layer::make_batch_norm(bn));

    const Matrix batch = Matrix::from_rows({{1.0}, {3.0}}); // mean 2, biased var 1
    diabnet::forward(model, batch, ForwardMode::Train);
    CHECK(model.layers[0].batch_norm.running_mean[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(model.layers[0].batch_norm.running_var[0] == doctest::Approx(1.0).epsilon(1e-15));

    // Repeated passes over the same batch converge to the batch statistics.
    for (int i = 0; i < 200; ++i) diabnet::forward(model, batch, ForwardMode::Train);
    CHECK(std::abs(model.layers[0].batch_norm.running_mean[0] - 2.0) < 1e-6);
    CHECK(std::abs(model.layers[0].batch_norm.running_var[0] - 1.0) < 1e-9);
}

TEST_CASE("inference mode never mutates the model and ignores batch composition") {
    Model model = diabnet::build({5, {8, 6, 4}, Activation::Sigmoid, 2, 3});
    // Push running stats away from the (0, 1) defaults first.
    diabnet::forward(model, random_batch(16, 5, 21), ForwardMode::Train);
    const Model frozen = model;

    const Matrix batch = random_batch(10, 5, 22);
    const Matrix all_at_once = diabnet::forward_infer(model, batch);
    CHECK(model == frozen);

    for (std::size_t r = 0; r < batch.rows(); ++r) {
        Matrix single(1, 5);
        for (std::size_t c = 0; c < 5; ++c) single(0, c) = batch(r, c);
        const Matrix one = diabnet::forward_infer(model, single);
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(one(0, c) == all_at_once(r, c)); // bitwise
        }
    }
}

TEST_CASE("softmax outputs are strict probabilities in both modes") {
    Model model = diabnet::build({4, {6, 5, 4}, Activation::Relu, 2, 17});
    const Matrix batch = random_batch(8, 4, 55);
    for (ForwardMode mode : {ForwardMode::Train, ForwardMode::Infer}) {
        const Matrix probs = diabnet::forward(model, batch, mode);
        for (std::size_t r = 0; r < probs.rows(); ++r) {
            double sum = 0.0;
            for (std::size_t c = 0; c < 2; ++c) {
                CHECK(probs(r, c) > 0.0);
                CHECK(probs(r, c) < 1.0);
                sum += probs(r, c);
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("hand-computed softmax: identity weights on [1, 0] give e/(e+1)") {
    const Model model = toy_softmax_model(Matrix::identity(2), {0.0, 0.0});
    const Matrix probs = diabnet::forward_infer(model, Matrix::from_rows({{1, 0}}));
    const double e = std::exp(1.0);
    CHECK(probs(0, 0) == doctest::Approx(e / (e + 1.0)).epsilon(1e-15));
    CHECK(probs(0, 1) == doctest::Approx(1.0 / (e + 1.0)).epsilon(1e-15));
}

TEST_CASE("forward rejects bad shapes and one-row train batches") {
    Model model = diabnet::build({4, {6}, Activation::Sigmoid, 2, 1});
    CHECK_THROWS_AS(diabnet::forward(model, Matrix(3, 5), ForwardMode::Infer),
                    diabnet::ShapeError);
    CHECK_THROWS_WITH_AS(diabnet::forward(model, Matrix(1, 4), ForwardMode::Train),
                         doctest::Contains("at least 2 rows"), diabnet::ShapeError);
}

TEST_CASE("perfect predictions produce near-zero gradients") {
    // Saturated logits: rows [1,0] -> class 0 and [0,1] -> class 1, both with
    // probability ~1, so (probs - one_hot)/n vanishes.
    Model model = toy_softmax_model(Matrix::from_rows({{40, -40}, {-40, 40}}), {0.0, 0.0});
    const Matrix batch = Matrix::from_rows({{1, 0}, {0, 1}});
    diabnet::ForwardCache cache;
    diabnet::forward(model, batch, ForwardMode::Train, &cache);
    const diabnet::Gradients grads = diabnet::backward(model, cache, {0, 1});
    for (const auto& layer : grads.layers) {
        for (std::size_t r = 0; r < layer.weights.rows(); ++r) {
            for (std::size_t c = 0; c < layer.weights.cols(); ++c) {
                CHECK(std::abs(layer.weights(r, c)) < 1e-6);
            }
        }
        for (double b : layer.bias) CHECK(std::abs(b) < 1e-6);
    }
}

TEST_CASE("duplicating every batch row leaves mean-loss gradients unchanged") {
    const ModelConfig config{5, {8, 6, 4}, Activation::Sigmoid, 2, 29};
    const Matrix batch = random_batch(6, 5, 61);
    const std::vector<int> labels = random_labels(6, 62);

    Matrix doubled(12, 5);
    std::vector<int> doubled_labels(12);
    for (std::size_t r = 0; r < 6; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            doubled(r, c) = batch(r, c);
            doubled(r + 6, c) = batch(r, c);
        }
        doubled_labels[r] = labels[r];
        doubled_labels[r + 6] = labels[r];
    }

    Model model_a = diabnet::build(config);
    diabnet::ForwardCache cache_a;
    diabnet::forward(model_a, batch, ForwardMode::Train, &cache_a);
    const diabnet::Gradients grads_a = diabnet::backward(model_a, cache_a, labels);

    Model model_b = diabnet::build(config);
    diabnet::ForwardCache cache_b;
    diabnet::forward(model_b, doubled, ForwardMode::Train, &cache_b);
    const diabnet::Gradients grads_b = diabnet::backward(model_b, cache_b, doubled_labels);

    REQUIRE(grads_a.layers.size() == grads_b.layers.size());
    for (std::size_t i = 0; i < grads_a.layers.size(); ++i) {
        const auto& a = grads_a.layers[i];
        const auto& b = grads_b.layers[i];
        for (std::size_t r = 0; r < a.weights.rows(); ++r) {
            for (std::size_t c = 0; c < a.weights.cols(); ++c) {
                CHECK(std::abs(a.weights(r, c) - b.weights(r, c)) < 1e-10);
            }
        }
        for (std::size_t j = 0; j < a.bias.size(); ++j) {
            CHECK(std::abs(a.bias[j] - b.bias[j]) < 1e-10);
        }
        for (std::size_t j = 0; j < a.gamma.size(); ++j) {
            CHECK(std::abs(a.gamma[j] - b.gamma[j]) < 1e-10);
            CHECK(std::abs(a.beta[j] - b.beta[j]) < 1e-10);
        }
    }
}

TEST_CASE("backward validates labels and cache pairing") {
    Model model = diabnet::build({3, {4}, Activation::Sigmoid, 2, 5});
    const Matrix batch = random_batch(4, 3, 71);
    diabnet::ForwardCache cache;
    diabnet::forward(model, batch, ForwardMode::Train, &cache);
    CHECK_THROWS_AS(diabnet::backward(model, cache, {0, 1}), diabnet::ShapeError);
    CHECK_THROWS_AS(diabnet::backward(model, cache, {0, 1, 2, 0}), diabnet::LabelError);
}

TEST_CASE("gradient_check: full BPNN with BN stays under 1e-4") {
    Model model = diabnet::build({5, {8, 6, 4}, Activation::Sigmoid, 2, 13});
    const Matrix batch = random_batch(6, 5, 83);
    const std::vector<int> labels = random_labels(6, 84);
    CHECK(diabnet::gradient_check(model, batch, labels, 1e-5) < 1e-4);
}

TEST_CASE("gradient_check: relu stack stays under 1e-4") {
    Model model = diabnet::build({4, {6, 4}, Activation::Relu, 2, 19});
    const Matrix batch = random_batch(6, 4, 85);
    const std::vector<int> labels = random_labels(6, 86);
    CHECK(diabnet::gradient_check(model, batch, labels, 1e-5) < 1e-4);
}

TEST_CASE("gradient_check: pure softmax regression is near-exact") {
    Model model = toy_softmax_model(random_batch(3, 2, 91), {0.1, -0.2});
    const Matrix batch = random_batch(5, 3, 92);
    const std::vector<int> labels = random_labels(5, 93);
    CHECK(diabnet::gradient_check(model, batch, labels, 1e-5) < 1e-7);
}

TEST_CASE("gradient_check: a coarse step is worse than a fine one") {
    Model model = diabnet::build({4, {5}, Activation::Sigmoid, 2, 23});
    const Matrix batch = random_batch(6, 4, 95);
    const std::vector<int> labels = random_labels(6, 96);
    const double coarse = diabnet::gradient_check(model, batch, labels, 1e-2);
    const double fine = diabnet::gradient_check(model, batch, labels, 1e-5);
    CHECK(coarse > fine);
    CHECK_THROWS_AS(diabnet::gradient_check(model, batch, labels, 0.0), diabnet::ConfigError);
}

TEST_CASE("predict takes the argmax and breaks exact ties toward class 0") {
    // Zero weights -> logits [0, 0] -> probs [0.5, 0.5] -> class 0.
    const Model tie = toy_softmax_model(Matrix(2, 2), {0.0, 0.0});
    const auto tie_pred = diabnet::predict(tie, Matrix::from_rows({{1, 2}}));
    CHECK(tie_pred.classes == std::vector<int>{0});
    CHECK(tie_pred.probs(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

    // Identity weights order the classes by the larger input coordinate.
    const Model ident = toy_softmax_model(Matrix::identity(2), {0.0, 0.0});
    const auto pred = diabnet::predict(ident, Matrix::from_rows({{2, 0}, {0, 2}}));
    CHECK(pred.classes == std::vector<int>{0, 1});

    CHECK_THROWS_AS(diabnet::predict(ident, Matrix(1, 3)), diabnet::ShapeError);
}
