#ifndef DIABNET_TRAINING_HPP
#define DIABNET_TRAINING_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace diabnet {

enum class Optimizer { Sgd, Adam };

std::string to_string(Optimizer opt);
Optimizer optimizer_from_string(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CrossEntropyResult {
    double loss = 0.0;
    Matrix grad_logits; // (probs - one_hot) / n, fused through the softmax
};

/// Mean cross-entropy over the batch; probabilities are clamped to >= 1e-12
/// before the log.
CrossEntropyResult cross_entropy(const Matrix& probs, const std::vector<int>& labels);

struct AdamHyperParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam first/second moments laid out flat over the canonical parameter
/// order; t counts completed steps.
struct OptimizerState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t t = 0;
    AdamHyperParams hyper;

    static OptimizerState for_model(const Model& model, AdamHyperParams hyper = {});
};

// Span-level update kernels.
void sgd_update(std::span<double> params, std::span<const double> grads, double learning_rate);
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::size_t t,
                 double learning_rate, const AdamHyperParams& hyper);

// Whole-model steps over the canonical parameter order.
void sgd_step(Model& model, const Gradients& grads, double learning_rate);
void adam_step(Model& model, const Gradients& grads, OptimizerState& state,
               double learning_rate);

struct TrainHistory {
    std::vector<double> losses;     // per-epoch mean training loss
    std::vector<double> accuracies; // per-epoch inference-mode training accuracy
};

/// Mini-batch training. Each epoch shuffles the rows with the config seed's
/// stream, keeps a final partial batch only when it has at least 2 rows, and
/// records loss/accuracy. Deterministic for fixed (model, config, data).
TrainHistory train(Model& model, const Dataset& train_set, const TrainConfig& config);

} // namespace diabnet

#endif // DIABNET_TRAINING_HPP
