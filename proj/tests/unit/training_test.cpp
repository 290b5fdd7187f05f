#include <diabnet/errors.hpp>
#include <diabnet/training.hpp>

#include <doctest.h>

#include "../support/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

using diabnet::Activation;
using diabnet::Dataset;
using diabnet::Matrix;
using diabnet::Model;
using diabnet::Optimizer;
using diabnet::TrainConfig;

TEST_CASE("cross_entropy hand values") {
    SUBCASE("perfect prediction costs nothing") {
        const auto result = diabnet::cross_entropy(Matrix::from_rows({{1, 0}}), {0});
        CHECK(result.loss == 0.0);
    }
    SUBCASE("uniform prediction costs ln 2") {
        for (int label : {0, 1}) {
            const auto result = diabnet::cross_entropy(Matrix::from_rows({{0.5, 0.5}}), {label});
            CHECK(result.loss == doctest::Approx(std::log(2.0)).epsilon(1e-15));
        }
    }
    SUBCASE("zero probability is clamped to 1e-12 before the log") {
        const auto result = diabnet::cross_entropy(Matrix::from_rows({{0, 1}}), {0});
        CHECK(result.loss == doctest::Approx(-std::log(1e-12)).epsilon(1e-15));
    }
    SUBCASE("fused gradient is (probs - one_hot) / n") {
        const auto result = diabnet::cross_entropy(Matrix::from_rows({{0.7, 0.3}}), {0});
        CHECK(result.grad_logits(0, 0) == doctest::Approx(-0.3).epsilon(1e-15));
        CHECK(result.grad_logits(0, 1) == doctest::Approx(0.3).epsilon(1e-15));

        const auto pair = diabnet::cross_entropy(Matrix::from_rows({{0.7, 0.3}, {0.2, 0.8}}),
                                                 {0, 1});
        CHECK(pair.grad_logits(0, 0) == doctest::Approx(-0.15).epsilon(1e-15));
        CHECK(pair.grad_logits(1, 1) == doctest::Approx(-0.1).epsilon(1e-15));
    }
}

TEST_CASE("cross_entropy of a batch is the mean of its single-row losses") {
    const Matrix probs = Matrix::from_rows({{0.9, 0.1}, {0.4, 0.6}});
    const std::vector<int> labels = {0, 1};
    const double batch_loss = diabnet::cross_entropy(probs, labels).loss;
    const double first = diabnet::cross_entropy(Matrix::from_rows({{0.9, 0.1}}), {0}).loss;
    const double second = diabnet::cross_entropy(Matrix::from_rows({{0.4, 0.6}}), {1}).loss;
    CHECK(std::abs(batch_loss - 0.5 * (first + second)) < 1e-12);
}

TEST_CASE("cross_entropy rejects bad labels and shapes") {
    CHECK_THROWS_AS(diabnet::cross_entropy(Matrix::from_rows({{0.5, 0.5}}), {2}),
                    diabnet::LabelError);
    CHECK_THROWS_AS(diabnet::cross_entropy(Matrix::from_rows({{0.5, 0.5}}), {0, 1}),
                    diabnet::ShapeError);
    CHECK_THROWS_AS(diabnet::cross_entropy(Matrix(0, 2), {}), diabnet::EmptyInputError);
}

TEST_CASE("sgd_update applies p -= lr * g exactly") {
    std::vector<double> params = {1.0, 2.0};
    const std::vector<double> grads = {0.5, -1.0};
    diabnet::sgd_update(params, grads, 0.1);
    CHECK(params[0] == 0.95);
    CHECK(params[1] == 2.1);

    // A second identical step doubles the displacement.
    diabnet::sgd_update(params, grads, 0.1);
    CHECK(params[0] == doctest::Approx(0.9).epsilon(1e-15));

    const std::vector<double> zeros = {0.0, 0.0};
    std::vector<double> before = params;
    diabnet::sgd_update(params, zeros, 0.1);
    CHECK(params == before);

    const std::vector<double> short_grads = {1.0};
    CHECK_THROWS_AS(diabnet::sgd_update(params, short_grads, 0.1), diabnet::ShapeError);
}

TEST_CASE("adam first step moves by about -lr after bias correction") {
    std::vector<double> params = {0.0};
    std::vector<double> m = {0.0}, v = {0.0};
    const std::vector<double> grads = {1.0};
    diabnet::adam_update(params, grads, m, v, 1, 0.001, {});
    // m-hat = v-hat = 1, so the step is lr / (1 + eps).
    CHECK(std::abs(params[0] + 0.001) < 1e-9);
    CHECK(m[0] == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(v[0] == doctest::Approx(0.001).epsilon(1e-12));
}

TEST_CASE("adam's per-step size approaches lr under a constant gradient") {
    std::vector<double> params = {0.0};
    std::vector<double> m = {0.0}, v = {0.0};
    const std::vector<double> grads = {3.7}; // magnitude must not matter
    double previous = params[0];
    double last_step = 0.0;
    for (std::size_t t = 1; t <= 100; ++t) {
        diabnet::adam_update(params, grads, m, v, t, 0.001, {});
        last_step = std::abs(params[0] - previous);
        previous = params[0];
    }
    CHECK(last_step == doctest::Approx(0.001).epsilon(0.05));
}

TEST_CASE("adam with a zero gradient and zero state is a fixed point") {
    std::vector<double> params = {1.5};
    std::vector<double> m = {0.0}, v = {0.0};
    const std::vector<double> zero_grad = {0.0};
    diabnet::adam_update(params, zero_grad, m, v, 1, 0.1, {});
    CHECK(params[0] == 1.5);

    std::vector<double> wrong = {0.0, 0.0};
    CHECK_THROWS_AS(diabnet::adam_update(params, zero_grad, wrong, v, 1, 0.1, {}),
                    diabnet::ShapeError);
}

TEST_CASE("OptimizerState::for_model sizes moments to the parameter count") {
    const Model model = diabnet::build({4, {6, 5}, Activation::Sigmoid, 2, 1});
    const auto state = diabnet::OptimizerState::for_model(model);
    CHECK(state.m.size() == diabnet::parameter_count(model));
    CHECK(state.v.size() == state.m.size());
    CHECK(state.t == 0);
}

TEST_CASE("adam_step rejects optimizer state sized for a different model") {
    Model model = diabnet::build({4, {6, 5}, Activation::Sigmoid, 2, 1});
    const Model other = diabnet::build({4, {3}, Activation::Sigmoid, 2, 1});

    const Matrix batch(2, 4, 0.5);
    diabnet::ForwardCache cache;
    diabnet::forward(model, batch, diabnet::ForwardMode::Train, &cache);
    const diabnet::Gradients grads = diabnet::backward(model, cache, {0, 1});

    auto small_state = diabnet::OptimizerState::for_model(other);
    CHECK_THROWS_AS(diabnet::adam_step(model, grads, small_state, 0.001), diabnet::ShapeError);
}

TEST_CASE("adam_step counts one step per call") {
    Model model = diabnet::build({3, {4}, Activation::Sigmoid, 2, 2});
    auto state = diabnet::OptimizerState::for_model(model);
    const Matrix batch(4, 3, 0.25);
    for (std::size_t i = 1; i <= 3; ++i) {
        diabnet::ForwardCache cache;
        diabnet::forward(model, batch, diabnet::ForwardMode::Train, &cache);
        diabnet::adam_step(model, diabnet::backward(model, cache, {0, 1, 1, 0}), state, 1e-3);
        CHECK(state.t == i);
    }
}

TEST_CASE("TrainConfig::validate rejects degenerate settings") {
    TrainConfig config;
    config.epochs = 0;
    CHECK_THROWS_AS(config.validate(), diabnet::ConfigError);
    config.epochs = 1;
    config.batch_size = 1;
    CHECK_THROWS_AS(config.validate(), diabnet::ConfigError);
    config.batch_size = 2;
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(config.validate(), diabnet::ConfigError);
    config.learning_rate = 1e-3;
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("train is deterministic and records one history row per epoch") {
    const Dataset blobs = testsupport::gaussian_blobs(8, 3, 3.0, 404);
    const diabnet::ModelConfig model_config{3, {6, 4}, Activation::Sigmoid, 2, 5};
    TrainConfig config;
    config.epochs = 5;
    config.batch_size = 4;
    config.learning_rate = 1e-3;
    config.optimizer = Optimizer::Adam;
    config.seed = 77;

    Model model_a = diabnet::build(model_config);
    const auto history_a = diabnet::train(model_a, blobs, config);
    Model model_b = diabnet::build(model_config);
    const auto history_b = diabnet::train(model_b, blobs, config);

    CHECK(model_a == model_b);
    CHECK(history_a.losses == history_b.losses);
    CHECK(history_a.accuracies == history_b.accuracies);
    CHECK(history_a.losses.size() == 5);
    CHECK(history_a.accuracies.size() == 5);
    for (double loss : history_a.losses) {
        CHECK(std::isfinite(loss));
        CHECK(loss >= 0.0);
    }

    TrainConfig one_epoch = config;
    one_epoch.epochs = 1;
    Model model_c = diabnet::build(model_config);
    CHECK(diabnet::train(model_c, blobs, one_epoch).losses.size() == 1);
}

TEST_CASE("train matches a step-by-step replication that drops the lone final row") {
    // 5 rows with batch_size 4: each epoch runs one 4-row batch and discards
    // the shuffled-out last row (it cannot feed batch norm).
    Dataset five = testsupport::gaussian_blobs(3, 2, 2.0, 88);
    five.features = five.features.select_rows({0, 1, 2, 3, 4});
    five.labels.resize(5);

    const diabnet::ModelConfig model_config{2, {4}, Activation::Sigmoid, 2, 9};
    TrainConfig config;
    config.epochs = 3;
    config.batch_size = 4;
    config.learning_rate = 1e-2;
    config.optimizer = Optimizer::Sgd;
    config.seed = 123;

    Model trained = diabnet::build(model_config);
    diabnet::train(trained, five, config);

    // Independent replication of the documented loop.
    Model manual = diabnet::build(model_config);
    diabnet::Rng shuffle_rng(config.seed);
    std::vector<std::size_t> order(5);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        const std::vector<std::size_t> batch_rows(order.begin(), order.begin() + 4);
        const Matrix batch = five.features.select_rows(batch_rows);
        std::vector<int> labels(4);
        for (std::size_t i = 0; i < 4; ++i) labels[i] = five.labels[batch_rows[i]];
        diabnet::ForwardCache cache;
        diabnet::forward(manual, batch, diabnet::ForwardMode::Train, &cache);
        diabnet::sgd_step(manual, diabnet::backward(manual, cache, labels), config.learning_rate);
    }
    CHECK(trained == manual);
}

TEST_CASE("full-batch SGD with a tiny learning rate never increases the loss") {
    const Dataset blobs = testsupport::gaussian_blobs(4, 2, 2.0, 51);
    Model model = diabnet::build({2, {5}, Activation::Sigmoid, 2, 3});
    TrainConfig config;
    config.epochs = 10;
    config.batch_size = 8; // full batch
    config.learning_rate = 1e-4;
    config.optimizer = Optimizer::Sgd;
    config.seed = 1;

    const auto history = diabnet::train(model, blobs, config);
    for (std::size_t e = 1; e < history.losses.size(); ++e) {
        CHECK(history.losses[e] <= history.losses[e - 1] + 1e-12);
    }
}

TEST_CASE("train learns well-separated blobs") {
    const Dataset blobs = testsupport::gaussian_blobs(10, 2, 6.0, 314);
    Model model = diabnet::build({2, {8}, Activation::Relu, 2, 15});
    TrainConfig config;
    config.epochs = 100;
    config.batch_size = 4;
    config.learning_rate = 1e-2;
    config.optimizer = Optimizer::Adam;
    config.seed = 6;

    const auto history = diabnet::train(model, blobs, config);
    CHECK(history.accuracies.back() == 1.0);
}

TEST_CASE("an absurd learning rate raises DivergenceError with location info") {
    const Dataset blobs = testsupport::gaussian_blobs(8, 3, 4.0, 240);
    Model model = diabnet::build({3, {8, 6}, Activation::Relu, 2, 10});
    TrainConfig config;
    config.epochs = 200;
    config.batch_size = 8;
    config.learning_rate = 1e12;
    config.optimizer = Optimizer::Sgd;
    config.seed = 4;

    try {
        diabnet::train(model, blobs, config);
        FAIL("expected DivergenceError");
    } catch (const diabnet::DivergenceError& err) {
        CHECK(err.epoch < 200);
        CHECK(std::string(err.what()).find("diverged") != std::string::npos);
    }
}

TEST_CASE("train rejects datasets smaller than one batch") {
    const Dataset blobs = testsupport::gaussian_blobs(2, 2, 2.0, 7);
    Model model = diabnet::build({2, {3}, Activation::Sigmoid, 2, 1});
    TrainConfig config;
    config.batch_size = 8; // only 4 rows available
    CHECK_THROWS_AS(diabnet::train(model, blobs, config), diabnet::ConfigError);
}
