#include "diabnet/baselines.hpp"

#include "diabnet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace diabnet {

KnnModel knn_fit(const Dataset& train, std::size_t k) {
    if (train.rows() == 0) throw EmptyInputError("knn_fit needs at least one training row");
    if (k == 0 || k > train.rows()) {
        throw ConfigError("knn k = " + std::to_string(k) + " outside [1, " +
                          std::to_string(train.rows()) + "]");
    }
    return {train.features, train.labels, k};
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double delta = a[i] - b[i];
        sum += delta * delta;
    }
    return std::sqrt(sum);
}

} // namespace

std::vector<int> knn_predict(const KnnModel& model, const Matrix& queries) {
    if (queries.cols() != model.train_features.cols()) {
        throw ShapeError("knn query width " + std::to_string(queries.cols()) +
                         " does not match stored width " +
                         std::to_string(model.train_features.cols()));
    }
    if (model.k == 0 || model.k > model.train_features.rows()) {
        throw ConfigError("knn k = " + std::to_string(model.k) + " outside [1, " +
                          std::to_string(model.train_features.rows()) + "]");
    }

    const std::size_t n = model.train_features.rows();
    std::vector<int> predictions(queries.rows());
    std::vector<std::pair<double, std::size_t>> by_distance(n);

    for (std::size_t q = 0; q < queries.rows(); ++q) {
        for (std::size_t i = 0; i < n; ++i) {
            by_distance[i] = {euclidean(queries.row(q), model.train_features.row(i)), i};
        }
        // pair's ordering already breaks distance ties by the lower row index
        std::partial_sort(by_distance.begin(), by_distance.begin() + model.k,
                          by_distance.end());

        std::size_t votes[2] = {0, 0};
        double summed[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < model.k; ++i) {
            const int label = model.train_labels[by_distance[i].second];
            ++votes[label];
            summed[label] += by_distance[i].first;
        }
        int winner = 0;
        if (votes[1] > votes[0]) {
            winner = 1;
        } else if (votes[1] == votes[0] && summed[1] < summed[0]) {
            winner = 1;
        }
        predictions[q] = winner;
    }
    return predictions;
}

namespace {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

constexpr double kProbFloor = 1e-12;

} // namespace

LogisticGradient logistic_loss_gradient(const LogisticModel& model, const Matrix& features,
                                        const std::vector<int>& labels) {
    if (features.cols() != model.weights.size()) {
        throw ShapeError("logistic model has " + std::to_string(model.weights.size()) +
                         " weights for " + std::to_string(features.cols()) + " features");
    }
    if (features.rows() != labels.size()) {
        throw ShapeError("logistic gradient: " + std::to_string(features.rows()) +
                         " rows vs " + std::to_string(labels.size()) + " labels");
    }
    if (features.rows() == 0) throw EmptyInputError("logistic gradient over zero rows");

    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    LogisticGradient grad;
    grad.d_weights.assign(d, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const auto x = features.row(i);
        double z = model.bias;
        for (std::size_t j = 0; j < d; ++j) z += model.weights[j] * x[j];
        const double p = sigmoid(z);
        const double y = static_cast<double>(labels[i]);
        grad.loss -= y * std::log(std::max(p, kProbFloor)) +
                     (1.0 - y) * std::log(std::max(1.0 - p, kProbFloor));
        const double residual = p - y;
        for (std::size_t j = 0; j < d; ++j) grad.d_weights[j] += residual * x[j];
        grad.d_bias += residual;
    }

    const double scale = 1.0 / static_cast<double>(n);
    grad.loss *= scale;
    for (double& g : grad.d_weights) g *= scale;
    grad.d_bias *= scale;
    return grad;
}

LogisticModel logistic_fit(const Dataset& train, double learning_rate, std::size_t epochs) {
    if (train.rows() == 0) throw EmptyInputError("logistic_fit needs training rows");
    if (train.count_label(0) == 0 || train.count_label(1) == 0) {
        throw LabelError("logistic_fit needs both classes present");
    }
    if (learning_rate <= 0.0) throw ConfigError("logistic learning rate must be > 0");

    LogisticModel model;
    model.weights.assign(train.cols(), 0.0);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        const LogisticGradient grad = logistic_loss_gradient(model, train.features, train.labels);
        if (!std::isfinite(grad.loss)) {
            throw DivergenceError("logistic loss became non-finite", epoch, 0);
        }
        for (std::size_t j = 0; j < model.weights.size(); ++j) {
            model.weights[j] -= learning_rate * grad.d_weights[j];
        }
        model.bias -= learning_rate * grad.d_bias;
    }

    for (double w : model.weights) {
        if (!std::isfinite(w)) {
            throw DivergenceError("logistic weights became non-finite", epochs, 0);
        }
    }
    if (!std::isfinite(model.bias)) {
        throw DivergenceError("logistic bias became non-finite", epochs, 0);
    }
    return model;
}

std::pair<std::vector<int>, std::vector<double>> logistic_predict(const LogisticModel& model,
                                                                  const Matrix& features) {
    if (features.cols() != model.weights.size()) {
        throw ShapeError("logistic model has " + std::to_string(model.weights.size()) +
                         " weights for " + std::to_string(features.cols()) + " features");
    }
    std::vector<int> classes(features.rows());
    std::vector<double> probabilities(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto x = features.row(i);
        double z = model.bias;
        for (std::size_t j = 0; j < features.cols(); ++j) z += model.weights[j] * x[j];
        const double p = sigmoid(z);
        probabilities[i] = p;
        classes[i] = p > 0.5 ? 1 : 0;
    }
    return {std::move(classes), std::move(probabilities)};
}

} // namespace diabnet
