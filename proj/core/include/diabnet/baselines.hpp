#ifndef DIABNET_BASELINES_HPP
#define DIABNET_BASELINES_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/matrix.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace diabnet {

/// k-nearest-neighbors over stored (standardized) training rows.
struct KnnModel {
    Matrix train_features;
    std::vector<int> train_labels;
    std::size_t k = 5;
};

/// Validates 1 <= k <= rows and stores the training set.
KnnModel knn_fit(const Dataset& train, std::size_t k = 5);

/// Majority vote among the k nearest rows by Euclidean distance. Distance
/// ties prefer the lower training-row index; vote ties prefer the class with
/// the smaller summed distance within the k-set, then class 0.
std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries);

/// Logistic regression: p = sigmoid(w . x + b).
struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
};

struct LogisticGradient {
    double loss = 0.0; // mean binary cross-entropy
    std::vector<double> d_weights;
    double d_bias = 0.0;
};

/// Loss and full-batch gradient at the given parameters; exposed so the
/// gradient can be checked against finite differences.
LogisticGradient logistic_loss_gradient(const LogisticModel& model, const Matrix& features,
                                        const std::vector<int>& labels);

/// Full-batch gradient descent on mean binary cross-entropy from
/// zero-initialized parameters. Deterministic; throws DivergenceError if the
/// loss leaves the finite range.
LogisticModel logistic_fit(const Dataset& train, double learning_rate = 0.1,
                           std::size_t epochs = 500);

/// Predicted classes and probabilities; class 1 iff p > 0.5 (exactly 0.5
/// stays class 0).
std::pair<std::vector<int>, std::vector<double>> logistic_predict(const LogisticModel& model,
                                                                  const Matrix& features);

} // namespace diabnet

#endif // DIABNET_BASELINES_HPP
