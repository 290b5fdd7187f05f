#include "diabnet/training.hpp"

#include "diabnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diabnet {

std::string to_string(Optimizer opt) {
    return opt == Optimizer::Sgd ? "sgd" : "adam";
}

Optimizer optimizer_from_string(const std::string& name) {
    if (name == "sgd") return Optimizer::Sgd;
    if (name == "adam") return Optimizer::Adam;
    throw ConfigError("unknown optimizer '" + name + "'");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be at least 1");
    if (batch_size < 2) throw ConfigError("train: batch_size must be at least 2");
    if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
}

CrossEntropyResult cross_entropy(const Matrix& probs, const std::vector<int>& labels) {
    const std::size_t n = probs.rows();
    if (labels.size() != n) {
        throw ShapeError("cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + probs.shape_str() + " probabilities");
    }
    if (n == 0) {
        throw EmptyInputError("cross_entropy: empty batch");
    }

    CrossEntropyResult result;
    result.grad_logits = Matrix(n, probs.cols());
    const double inv_n = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const int label = labels[r];
        if (label != 0 && label != 1) {
            throw LabelError("cross_entropy: label " + std::to_string(label) + " at row " +
                             std::to_string(r) + " is not 0 or 1");
        }
        auto p_row = probs.row(r);
        auto g_row = result.grad_logits.row(r);
        total += -std::log(std::max(p_row[static_cast<std::size_t>(label)], 1e-12));
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            g_row[c] = (p_row[c] - (static_cast<std::size_t>(label) == c ? 1.0 : 0.0)) * inv_n;
        }
    }
    result.loss = total * inv_n;
    return result;
}

OptimizerState OptimizerState::for_model(const Model& model, AdamHyperParams hyper) {
    OptimizerState state;
    state.m.assign(parameter_count(model), 0.0);
    state.v.assign(parameter_count(model), 0.0);
    state.hyper = hyper;
    return state;
}

void sgd_update(std::span<double> params, std::span<const double> grads, double learning_rate) {
    if (params.size() != grads.size()) {
        throw ShapeError("sgd_update: " + std::to_string(params.size()) + " parameters vs " +
                         std::to_string(grads.size()) + " gradients");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= learning_rate * grads[i];
    }
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::size_t t,
                 double learning_rate, const AdamHyperParams& hyper) {
    if (params.size() != grads.size() || params.size() != m.size() || params.size() != v.size()) {
        throw ShapeError("adam_update: mismatched spans (" + std::to_string(params.size()) +
                         " params, " + std::to_string(grads.size()) + " grads, " +
                         std::to_string(m.size()) + "/" + std::to_string(v.size()) + " moments)");
    }
    const double m_corr = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
    const double v_corr = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * grads[i];
        v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * grads[i] * grads[i];
        const double m_hat = m[i] / m_corr;
        const double v_hat = v[i] / v_corr;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + hyper.epsilon);
    }
}

void sgd_step(Model& model, const Gradients& grads, double learning_rate) {
    for_each_param_span(model, grads,
                        [&](std::span<double> p, std::span<const double> g) {
                            sgd_update(p, g, learning_rate);
                        });
}

void adam_step(Model& model, const Gradients& grads, OptimizerState& state,
               double learning_rate) {
    ++state.t;
    std::size_t offset = 0;
    for_each_param_span(model, grads, [&](std::span<double> p, std::span<const double> g) {
        if (offset + p.size() > state.m.size()) {
            throw ShapeError("adam_step: optimizer state smaller than the model");
        }
        adam_update(p, g,
                    std::span<double>(state.m).subspan(offset, p.size()),
                    std::span<double>(state.v).subspan(offset, p.size()),
                    state.t, learning_rate, state.hyper);
        offset += p.size();
    });
    if (offset != state.m.size()) {
        throw ShapeError("adam_step: optimizer state larger than the model");
    }
}

namespace {

void check_parameters_finite(const Model& model, std::size_t epoch) {
    for (const Layer& layer : model.layers) {
        auto scan = [&](const std::vector<double>& values) {
            for (double v : values) {
                if (!std::isfinite(v)) {
                    throw DivergenceError("training diverged: non-finite parameter after epoch " +
                                              std::to_string(epoch),
                                          epoch, 0);
                }
            }
        };
        if (layer.kind == LayerKind::Dense) {
            for (double v : layer.dense.weights.data()) {
                if (!std::isfinite(v)) {
                    throw DivergenceError("training diverged: non-finite weight after epoch " +
                                              std::to_string(epoch),
                                          epoch, 0);
                }
            }
            scan(layer.dense.bias);
        } else if (layer.kind == LayerKind::BatchNorm) {
            scan(layer.batch_norm.gamma);
            scan(layer.batch_norm.beta);
            scan(layer.batch_norm.running_mean);
            scan(layer.batch_norm.running_var);
        }
    }
}

} // namespace

TrainHistory train(Model& model, const Dataset& train_set, const TrainConfig& config) {
    config.validate();
    const std::size_t n = train_set.rows();
    if (n < config.batch_size) {
        throw ConfigError("train: dataset has " + std::to_string(n) +
                          " rows, fewer than batch_size " + std::to_string(config.batch_size));
    }

    Rng shuffle_rng(config.seed);
    OptimizerState state = OptimizerState::for_model(model);
    TrainHistory history;
    history.losses.reserve(config.epochs);
    history.accuracies.reserve(config.epochs);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t rows_used = 0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t count = std::min(config.batch_size, n - start);
            if (count < 2) break; // a lone final row cannot feed batch norm

            const std::vector<std::size_t> batch_rows(order.begin() + start,
                                                      order.begin() + start + count);
            const Matrix batch = train_set.features.select_rows(batch_rows);
            std::vector<int> labels(count);
            for (std::size_t i = 0; i < count; ++i) labels[i] = train_set.labels[batch_rows[i]];

            ForwardCache cache;
            const Matrix probs = forward(model, batch, ForwardMode::Train, &cache);
            const double loss = cross_entropy(probs, labels).loss;
            if (!std::isfinite(loss)) {
                throw DivergenceError("training diverged: non-finite loss at epoch " +
                                          std::to_string(epoch) + ", batch " +
                                          std::to_string(batch_index),
                                      epoch, batch_index);
            }
            loss_sum += loss * static_cast<double>(count);
            rows_used += count;

            const Gradients grads = backward(model, cache, labels);
            if (config.optimizer == Optimizer::Adam) {
                adam_step(model, grads, state, config.learning_rate);
            } else {
                sgd_step(model, grads, config.learning_rate);
            }
        }

        check_parameters_finite(model, epoch);

        const Prediction pred = predict(model, train_set.features);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pred.classes[i] == train_set.labels[i]) ++correct;
        }
        history.losses.push_back(loss_sum / static_cast<double>(rows_used));
        history.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(n));
    }
    return history;
}

} // namespace diabnet
