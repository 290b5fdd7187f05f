#ifndef DIABNET_MODEL_HPP
#define DIABNET_MODEL_HPP

#include "diabnet/matrix.hpp"
#include "diabnet/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diabnet {

enum class Activation { Sigmoid, Relu, Softmax };

std::string to_string(Activation fn);
Activation activation_from_string(const std::string& name);

/// Fully connected layer; weights are in x out so a batch multiplies from the
/// left, bias is one value per output unit.
struct DenseLayer {
    Matrix weights;
    std::vector<double> bias;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

/// Per-feature batch normalization. Training passes normalize with biased
/// batch statistics and fold them into the running averages; inference uses
/// the running averages only.
struct BatchNormLayer {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double epsilon = 1e-5;
    double momentum = 0.1;

    std::size_t dim() const { return gamma.size(); }
};

struct ActivationLayer {
    Activation fn = Activation::Sigmoid;
};

enum class LayerKind { Dense, BatchNorm, Activation };

struct Layer {
    LayerKind kind;
    DenseLayer dense;        // valid when kind == Dense
    BatchNormLayer batch_norm; // valid when kind == BatchNorm
    ActivationLayer activation; // valid when kind == Activation

    static Layer make_dense(DenseLayer d);
    static Layer make_batch_norm(BatchNormLayer b);
    static Layer make_activation(Activation fn);
};

struct ModelConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_sizes; // [64, 32, 16] and friends
    Activation activation = Activation::Sigmoid;
    std::size_t output_dim = 2;
    std::uint64_t seed = 0;
};

struct Model {
    std::vector<Layer> layers;
    std::size_t input_dim = 0;

    bool operator==(const Model&) const;
};

enum class ForwardMode { Train, Infer };

/// Everything the backward pass needs from a train-mode forward.
struct ForwardCache {
    // values[0] is the batch; values[i + 1] is the output of layer i.
    std::vector<Matrix> values;

    struct BnCache {
        Matrix normalized;                   // pre-affine x-hat
        std::vector<double> inv_std;         // 1 / max(sqrt(batch_var), eps)
        std::vector<unsigned char> clamped;  // columns where the eps guard bound
    };
    std::vector<BnCache> bn; // parallel to layers; empty for non-BN layers

    const Matrix& probs() const { return values.back(); }
};

/// Parameter gradients, mirroring the model's layer layout.
struct Gradients {
    struct LayerGrads {
        Matrix weights;            // dense
        std::vector<double> bias;  // dense
        std::vector<double> gamma; // batch norm
        std::vector<double> beta;  // batch norm
    };
    std::vector<LayerGrads> layers;
};

/// Builds the layer stack dense->BN->activation per hidden size, closed by a
/// dense projection to output_dim and a softmax. Weights are Glorot-uniform
/// from the config seed; biases 0, gamma 1, beta 0, running stats (0, 1).
Model build(const ModelConfig& config);

/// Forward pass. Train mode requires at least 2 rows, uses batch statistics
/// in BN layers and updates their running averages; inference mode is a pure
/// function of (model, input) and never mutates the model.
Matrix forward(Model& model, const Matrix& batch, ForwardMode mode,
               ForwardCache* cache = nullptr);
Matrix forward_infer(const Model& model, const Matrix& batch);

/// Analytic gradients of the mean cross-entropy loss for the batch captured
/// in cache. The softmax/cross-entropy pair is fused: the output gradient is
/// (probs - one_hot) / n.
Gradients backward(const Model& model, const ForwardCache& cache,
                   const std::vector<int>& labels);

struct Prediction {
    std::vector<int> classes;
    Matrix probs;
};

/// Inference forward plus argmax; an exact probability tie yields class 0.
Prediction predict(const Model& model, const Matrix& features);

/// Central-difference verification of backward() over every parameter.
/// Returns the maximum of |analytic - numeric| / max(|analytic|, |numeric|),
/// skipping entries where both magnitudes fall below 1e-7: dense biases that
/// feed a BN layer have exactly-zero gradients (the batch mean absorbs any
/// shift), so both sides carry nothing but rounding noise there.
double gradient_check(const Model& model, const Matrix& batch,
                      const std::vector<int>& labels, double step);

/// Walks every (parameter span, gradient span) pair of a model in a fixed
/// canonical order. Shared by the optimizers and the gradient checker.
template <typename Fn>
void for_each_param_span(Model& model, const Gradients& grads, Fn&& fn) {
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        Layer& layer = model.layers[i];
        const Gradients::LayerGrads& g = grads.layers[i];
        if (layer.kind == LayerKind::Dense) {
            fn(layer.dense.weights.data(), g.weights.data());
            fn(std::span<double>(layer.dense.bias), std::span<const double>(g.bias));
        } else if (layer.kind == LayerKind::BatchNorm) {
            fn(std::span<double>(layer.batch_norm.gamma), std::span<const double>(g.gamma));
            fn(std::span<double>(layer.batch_norm.beta), std::span<const double>(g.beta));
        }
    }
}

std::size_t parameter_count(const Model& model);

} // namespace diabnet

#endif // DIABNET_MODEL_HPP
