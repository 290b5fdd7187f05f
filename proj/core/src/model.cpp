#include "diabnet/model.hpp"

#include "diabnet/errors.hpp"
#include "diabnet/training.hpp"

#include <algorithm>
#include <cmath>

namespace diabnet {

std::string to_string(Activation fn) {
    switch (fn) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Relu: return "relu";
        case Activation::Softmax: return "softmax";
    }
    return "unknown";
}

Activation activation_from_string(const std::string& name) {
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "relu") return Activation::Relu;
    if (name == "softmax") return Activation::Softmax;
    throw ConfigError("unknown activation '" + name + "'");
}

Layer Layer::make_dense(DenseLayer d) {
    Layer layer;
    layer.kind = LayerKind::Dense;
    layer.dense = std::move(d);
    return layer;
}

Layer Layer::make_batch_norm(BatchNormLayer b) {
    Layer layer;
    layer.kind = LayerKind::BatchNorm;
    layer.batch_norm = std::move(b);
    return layer;
}

Layer Layer::make_activation(Activation fn) {
    Layer layer;
    layer.kind = LayerKind::Activation;
    layer.activation = ActivationLayer{fn};
    return layer;
}

bool Model::operator==(const Model& other) const {
    if (input_dim != other.input_dim || layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& a = layers[i];
        const Layer& b = other.layers[i];
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case LayerKind::Dense:
                if (a.dense.weights != b.dense.weights || a.dense.bias != b.dense.bias)
                    return false;
                break;
            case LayerKind::BatchNorm:
                if (a.batch_norm.gamma != b.batch_norm.gamma ||
                    a.batch_norm.beta != b.batch_norm.beta ||
                    a.batch_norm.running_mean != b.batch_norm.running_mean ||
                    a.batch_norm.running_var != b.batch_norm.running_var ||
                    a.batch_norm.epsilon != b.batch_norm.epsilon ||
                    a.batch_norm.momentum != b.batch_norm.momentum)
                    return false;
                break;
            case LayerKind::Activation:
                if (a.activation.fn != b.activation.fn) return false;
                break;
        }
    }
    return true;
}

namespace {

DenseLayer glorot_dense(std::size_t in, std::size_t out, Rng& rng) {
    DenseLayer layer;
    layer.weights = Matrix(in, out);
    layer.bias.assign(out, 0.0);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    auto data = layer.weights.data();
    for (double& w : data) {
        w = (2.0 * rng.next_double() - 1.0) * bound;
    }
    return layer;
}

BatchNormLayer init_batch_norm(std::size_t dim) {
    BatchNormLayer bn;
    bn.gamma.assign(dim, 1.0);
    bn.beta.assign(dim, 0.0);
    bn.running_mean.assign(dim, 0.0);
    bn.running_var.assign(dim, 1.0);
    return bn;
}

} // namespace

Model build(const ModelConfig& config) {
    if (config.input_dim == 0) {
        throw ConfigError("build: input_dim must be at least 1");
    }
    if (config.output_dim == 0) {
        throw ConfigError("build: output_dim must be at least 1");
    }
    for (std::size_t h : config.hidden_sizes) {
        if (h == 0) throw ConfigError("build: hidden layer of size 0");
    }
    if (config.activation == Activation::Softmax) {
        throw ConfigError("build: softmax is reserved for the output layer");
    }

    Rng rng(config.seed);
    Model model;
    model.input_dim = config.input_dim;

    std::size_t prev = config.input_dim;
    for (std::size_t h : config.hidden_sizes) {
        model.layers.push_back(Layer::make_dense(glorot_dense(prev, h, rng)));
        model.layers.push_back(Layer::make_batch_norm(init_batch_norm(h)));
        model.layers.push_back(Layer::make_activation(config.activation));
        prev = h;
    }
    model.layers.push_back(Layer::make_dense(glorot_dense(prev, config.output_dim, rng)));
    model.layers.push_back(Layer::make_activation(Activation::Softmax));
    return model;
}

namespace {

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
    if (input.cols() != layer.in_dim()) {
        throw ShapeError("dense layer expects " + std::to_string(layer.in_dim()) +
                         " inputs, got " + input.shape_str());
    }
    Matrix out = matmul(input, layer.weights);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < out.cols(); ++c) row[c] += layer.bias[c];
    }
    return out;
}

Matrix batch_norm_forward(BatchNormLayer& bn, const Matrix& input, ForwardMode mode,
                          ForwardCache::BnCache* cache) {
    const std::size_t n = input.rows();
    const std::size_t d = input.cols();
    if (d != bn.dim()) {
        throw ShapeError("batch norm expects " + std::to_string(bn.dim()) +
                         " features, got " + input.shape_str());
    }

    std::vector<double> mean(d, 0.0);
    std::vector<double> var(d, 0.0);
    if (mode == ForwardMode::Train) {
        for (std::size_t c = 0; c < d; ++c) {
            double sum = 0.0;
            for (std::size_t r = 0; r < n; ++r) sum += input(r, c);
            mean[c] = sum / static_cast<double>(n);
        }
        for (std::size_t c = 0; c < d; ++c) {
            double sq = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double delta = input(r, c) - mean[c];
                sq += delta * delta;
            }
            var[c] = sq / static_cast<double>(n); // biased, matching the normalization
        }
        for (std::size_t c = 0; c < d; ++c) {
            bn.running_mean[c] = (1.0 - bn.momentum) * bn.running_mean[c] + bn.momentum * mean[c];
            bn.running_var[c] = (1.0 - bn.momentum) * bn.running_var[c] + bn.momentum * var[c];
        }
    } else {
        mean = bn.running_mean;
        var = bn.running_var;
    }

    // epsilon is a division guard, not an additive term: dividing by the exact
    // batch sigma keeps the normalized variance at 1 for any healthy column,
    // while a near-constant column falls back to 1/eps instead of overflowing.
    std::vector<double> inv_std(d);
    std::vector<unsigned char> clamped(d, 0);
    for (std::size_t c = 0; c < d; ++c) {
        const double sd = std::sqrt(var[c]);
        if (sd > bn.epsilon) {
            inv_std[c] = 1.0 / sd;
        } else {
            inv_std[c] = 1.0 / bn.epsilon;
            clamped[c] = 1;
        }
    }

    Matrix normalized(n, d);
    Matrix out(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        auto in_row = input.row(r);
        auto norm_row = normalized.row(r);
        auto out_row = out.row(r);
        for (std::size_t c = 0; c < d; ++c) {
            norm_row[c] = (in_row[c] - mean[c]) * inv_std[c];
            out_row[c] = bn.gamma[c] * norm_row[c] + bn.beta[c];
        }
    }

    if (cache != nullptr) {
        cache->normalized = std::move(normalized);
        cache->inv_std = std::move(inv_std);
        cache->clamped = std::move(clamped);
    }
    return out;
}

Matrix activation_forward(const ActivationLayer& layer, const Matrix& input) {
    const std::size_t n = input.rows();
    const std::size_t d = input.cols();
    Matrix out(n, d);
    switch (layer.fn) {
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < input.size(); ++i) {
                out.data()[i] = 1.0 / (1.0 + std::exp(-input.data()[i]));
            }
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < input.size(); ++i) {
                out.data()[i] = input.data()[i] > 0.0 ? input.data()[i] : 0.0;
            }
            break;
        case Activation::Softmax:
            for (std::size_t r = 0; r < n; ++r) {
                auto in_row = input.row(r);
                auto out_row = out.row(r);
                double peak = in_row[0];
                for (std::size_t c = 1; c < d; ++c) peak = std::max(peak, in_row[c]);
                double sum = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    out_row[c] = std::exp(in_row[c] - peak);
                    sum += out_row[c];
                }
                for (std::size_t c = 0; c < d; ++c) out_row[c] /= sum;
            }
            break;
    }
    return out;
}

} // namespace

Matrix forward(Model& model, const Matrix& batch, ForwardMode mode, ForwardCache* cache) {
    if (batch.cols() != model.input_dim) {
        throw ShapeError("forward expects " + std::to_string(model.input_dim) +
                         " features, got " + batch.shape_str());
    }
    if (mode == ForwardMode::Train && batch.rows() < 2) {
        throw ShapeError("train-mode forward needs at least 2 rows for batch statistics, got " +
                         std::to_string(batch.rows()));
    }

    if (cache != nullptr) {
        cache->values.clear();
        cache->bn.assign(model.layers.size(), {});
        cache->values.reserve(model.layers.size() + 1);
        cache->values.push_back(batch);
    }

    Matrix current = batch;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        Layer& layer = model.layers[i];
        switch (layer.kind) {
            case LayerKind::Dense:
                current = dense_forward(layer.dense, current);
                break;
            case LayerKind::BatchNorm:
                current = batch_norm_forward(layer.batch_norm, current, mode,
                                             cache != nullptr ? &cache->bn[i] : nullptr);
                break;
            case LayerKind::Activation:
                current = activation_forward(layer.activation, current);
                break;
        }
        if (cache != nullptr) cache->values.push_back(current);
    }
    return current;
}

Matrix forward_infer(const Model& model, const Matrix& batch) {
    // Inference never touches running statistics, so the const_cast is safe.
    return forward(const_cast<Model&>(model), batch, ForwardMode::Infer, nullptr);
}

namespace {

Gradients::LayerGrads zero_grads_for(const Layer& layer) {
    Gradients::LayerGrads g;
    if (layer.kind == LayerKind::Dense) {
        g.weights = Matrix(layer.dense.in_dim(), layer.dense.out_dim());
        g.bias.assign(layer.dense.out_dim(), 0.0);
    } else if (layer.kind == LayerKind::BatchNorm) {
        g.gamma.assign(layer.batch_norm.dim(), 0.0);
        g.beta.assign(layer.batch_norm.dim(), 0.0);
    }
    return g;
}

} // namespace

Gradients backward(const Model& model, const ForwardCache& cache,
                   const std::vector<int>& labels) {
    if (cache.values.size() != model.layers.size() + 1) {
        throw ShapeError("backward: cache holds " + std::to_string(cache.values.size()) +
                         " activations for " + std::to_string(model.layers.size()) + " layers");
    }
    const Matrix& probs = cache.probs();
    const std::size_t n = probs.rows();
    if (labels.size() != n) {
        throw ShapeError("backward: " + std::to_string(labels.size()) + " labels for batch of " +
                         std::to_string(n));
    }
    if (model.layers.empty() || model.layers.back().kind != LayerKind::Activation ||
        model.layers.back().activation.fn != Activation::Softmax) {
        throw ConfigError("backward: model must end with a softmax output layer");
    }

    Gradients grads;
    grads.layers.reserve(model.layers.size());
    for (const Layer& layer : model.layers) {
        grads.layers.push_back(zero_grads_for(layer));
    }

    // Fused softmax/cross-entropy gradient with respect to the logits.
    Matrix grad(n, probs.cols());
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
        const int label = labels[r];
        if (label != 0 && label != 1) {
            throw LabelError("backward: label " + std::to_string(label) + " at row " +
                             std::to_string(r) + " is not 0 or 1");
        }
        auto p_row = probs.row(r);
        auto g_row = grad.row(r);
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            g_row[c] = (p_row[c] - (static_cast<std::size_t>(label) == c ? 1.0 : 0.0)) * inv_n;
        }
    }

    // The last layer is the fused softmax; start below it.
    for (std::size_t i = model.layers.size() - 1; i-- > 0;) {
        const Layer& layer = model.layers[i];
        const Matrix& input = cache.values[i];
        const Matrix& output = cache.values[i + 1];

        switch (layer.kind) {
            case LayerKind::Dense: {
                Gradients::LayerGrads& g = grads.layers[i];
                g.weights = matmul(transpose(input), grad);
                for (std::size_t r = 0; r < grad.rows(); ++r) {
                    auto g_row = grad.row(r);
                    for (std::size_t c = 0; c < grad.cols(); ++c) g.bias[c] += g_row[c];
                }
                grad = matmul(grad, transpose(layer.dense.weights));
                break;
            }
            case LayerKind::BatchNorm: {
                const BatchNormLayer& bn = layer.batch_norm;
                const ForwardCache::BnCache& bc = cache.bn[i];
                Gradients::LayerGrads& g = grads.layers[i];
                const std::size_t rows = grad.rows();
                const std::size_t d = grad.cols();
                const double inv_rows = 1.0 / static_cast<double>(rows);

                std::vector<double> sum_dxhat(d, 0.0);
                std::vector<double> sum_dxhat_xhat(d, 0.0);
                for (std::size_t r = 0; r < rows; ++r) {
                    auto g_row = grad.row(r);
                    auto x_row = bc.normalized.row(r);
                    for (std::size_t c = 0; c < d; ++c) {
                        g.beta[c] += g_row[c];
                        g.gamma[c] += g_row[c] * x_row[c];
                        const double dxhat = g_row[c] * bn.gamma[c];
                        sum_dxhat[c] += dxhat;
                        sum_dxhat_xhat[c] += dxhat * x_row[c];
                    }
                }
                // dX = inv_std/n * (n*dxhat - sum(dxhat) - xhat * sum(dxhat*xhat)),
                // the full backward including the batch-statistics terms. Where
                // the eps guard bound, the denominator is constant with respect
                // to the batch, so the variance term drops.
                Matrix next(rows, d);
                for (std::size_t r = 0; r < rows; ++r) {
                    auto g_row = grad.row(r);
                    auto x_row = bc.normalized.row(r);
                    auto n_row = next.row(r);
                    for (std::size_t c = 0; c < d; ++c) {
                        const double dxhat = g_row[c] * bn.gamma[c];
                        const double var_term =
                            bc.clamped[c] ? 0.0
                                          : x_row[c] * inv_rows * sum_dxhat_xhat[c];
                        n_row[c] = bc.inv_std[c] *
                                   (dxhat - inv_rows * sum_dxhat[c] - var_term);
                    }
                }
                grad = std::move(next);
                break;
            }
            case LayerKind::Activation: {
                Matrix next(grad.rows(), grad.cols());
                if (layer.activation.fn == Activation::Sigmoid) {
                    for (std::size_t idx = 0; idx < grad.size(); ++idx) {
                        const double y = output.data()[idx];
                        next.data()[idx] = grad.data()[idx] * y * (1.0 - y);
                    }
                } else if (layer.activation.fn == Activation::Relu) {
                    for (std::size_t idx = 0; idx < grad.size(); ++idx) {
                        next.data()[idx] = input.data()[idx] > 0.0 ? grad.data()[idx] : 0.0;
                    }
                } else {
                    throw ConfigError("backward: unexpected interior softmax layer");
                }
                grad = std::move(next);
                break;
            }
        }
    }
    return grads;
}

Prediction predict(const Model& model, const Matrix& features) {
    Prediction pred;
    pred.probs = forward_infer(model, features);
    pred.classes.reserve(features.rows());
    for (std::size_t r = 0; r < pred.probs.rows(); ++r) {
        auto row = pred.probs.row(r);
        std::size_t best = 0;
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c] > row[best]) best = c; // ties keep the lower class
        }
        pred.classes.push_back(static_cast<int>(best));
    }
    return pred;
}

std::size_t parameter_count(const Model& model) {
    std::size_t count = 0;
    for (const Layer& layer : model.layers) {
        if (layer.kind == LayerKind::Dense) {
            count += layer.dense.weights.size() + layer.dense.bias.size();
        } else if (layer.kind == LayerKind::BatchNorm) {
            count += layer.batch_norm.gamma.size() + layer.batch_norm.beta.size();
        }
    }
    return count;
}

namespace {

double batch_loss(Model model, const Matrix& batch, const std::vector<int>& labels) {
    const Matrix probs = forward(model, batch, ForwardMode::Train, nullptr);
    return cross_entropy(probs, labels).loss;
}

} // namespace

double gradient_check(const Model& model, const Matrix& batch,
                      const std::vector<int>& labels, double step) {
    if (step <= 0.0) {
        throw ConfigError("gradient_check: step must be positive");
    }

    Model work = model;
    ForwardCache cache;
    forward(work, batch, ForwardMode::Train, &cache);
    Gradients grads = backward(work, cache, labels);

    double max_rel_error = 0.0;
    Model probe = model;
    for_each_param_span(probe, grads, [&](std::span<double> params, std::span<const double> g) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            const double original = params[i];
            params[i] = original + step;
            const double loss_plus = batch_loss(probe, batch, labels);
            params[i] = original - step;
            const double loss_minus = batch_loss(probe, batch, labels);
            params[i] = original;

            const double numeric = (loss_plus - loss_minus) / (2.0 * step);
            const double scale = std::max(std::abs(numeric), std::abs(g[i]));
            // Dense biases feeding a BN layer have exactly-zero gradients (the
            // batch mean absorbs any shift); both sides are rounding noise
            // there, and comparing noise to noise says nothing about backward.
            if (scale < 1e-7) continue;
            max_rel_error = std::max(max_rel_error, std::abs(numeric - g[i]) / scale);
        }
    });
    return max_rel_error;
}

} // namespace diabnet
