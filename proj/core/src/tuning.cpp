#include "diabnet/tuning.hpp"

#include "diabnet/csv_io.hpp"
#include "diabnet/errors.hpp"
#include "diabnet/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace diabnet {

namespace {

// Distinct stream tags keep the fold plan off every config's seed stream.
constexpr std::uint64_t kFoldPlanStream = 0x666f6c64; // "fold"
constexpr std::uint64_t kConfigStream = 0x636667;     // "cfg"

} // namespace

void GridSpec::validate() const {
    if (hidden_layer_options.empty() || activation_options.empty() ||
        optimizer_options.empty() || batch_size_options.empty()) {
        throw ConfigError("every grid option list must be non-empty");
    }
    for (const auto& hidden : hidden_layer_options) {
        if (hidden.empty()) {
            throw ConfigError("grid hidden-layer option has no layers");
        }
        for (std::size_t width : hidden) {
            if (width == 0) throw ConfigError("grid hidden-layer width must be > 0");
        }
    }
    for (Activation act : activation_options) {
        if (act == Activation::Softmax) {
            throw ConfigError("softmax is reserved for the output layer");
        }
    }
    for (std::size_t batch : batch_size_options) {
        // Batch norm needs at least two rows per batch.
        if (batch < 2) throw ConfigError("grid batch size must be at least 2");
    }
}

std::size_t GridSpec::size() const {
    return hidden_layer_options.size() * activation_options.size() *
           optimizer_options.size() * batch_size_options.size();
}

GridSpec default_grid() {
    GridSpec grid;
    grid.hidden_layer_options = {{16, 8, 4}, {32, 16, 8}, {64, 32, 16}};
    grid.activation_options = {Activation::Sigmoid, Activation::Relu};
    grid.optimizer_options = {Optimizer::Sgd, Optimizer::Adam};
    grid.batch_size_options = {8, 16, 32};
    return grid;
}

HyperCombo combo_at(const GridSpec& grid, std::size_t index) {
    grid.validate();
    if (index >= grid.size()) {
        throw ConfigError("grid index " + std::to_string(index) + " out of range for " +
                          std::to_string(grid.size()) + " configurations");
    }
    HyperCombo combo;
    combo.batch_size = grid.batch_size_options[index % grid.batch_size_options.size()];
    index /= grid.batch_size_options.size();
    combo.optimizer = grid.optimizer_options[index % grid.optimizer_options.size()];
    index /= grid.optimizer_options.size();
    combo.activation = grid.activation_options[index % grid.activation_options.size()];
    index /= grid.activation_options.size();
    combo.hidden_sizes = grid.hidden_layer_options[index];
    return combo;
}

std::uint64_t fold_plan_seed(std::uint64_t base_seed) {
    return derive_seed(base_seed, kFoldPlanStream);
}

std::uint64_t config_seed(std::uint64_t base_seed, std::size_t config_index) {
    return derive_seed(derive_seed(base_seed, kConfigStream), config_index);
}

TuneResult evaluate_combo(const Dataset& train_set, const HyperCombo& combo,
                          std::size_t config_index, const FoldPlan& plan,
                          std::uint64_t seed, const TuneOptions& options) {
    if (plan.k < 2) throw ConfigError("fold plan must have k >= 2");
    if (plan.assignments.size() != train_set.rows()) {
        throw ShapeError("fold plan covers " + std::to_string(plan.assignments.size()) +
                         " rows but the dataset has " + std::to_string(train_set.rows()));
    }

    TuneResult result;
    result.combo = combo;
    result.config_index = config_index;
    result.fold_accuracies.assign(plan.k, 0.0);

    for (std::size_t fold = 0; fold < plan.k; ++fold) {
        const Dataset fold_train = train_set.select(plan.train_indices(fold));
        const Dataset fold_val = train_set.select(plan.validation_indices(fold));

        ModelConfig model_config;
        model_config.input_dim = train_set.cols();
        model_config.hidden_sizes = combo.hidden_sizes;
        model_config.activation = combo.activation;
        model_config.seed = derive_seed(seed, 2 * fold);

        TrainConfig train_config;
        train_config.epochs = options.epochs;
        train_config.batch_size = combo.batch_size;
        train_config.optimizer = combo.optimizer;
        train_config.learning_rate = combo.optimizer == Optimizer::Adam
                                         ? options.adam_learning_rate
                                         : options.sgd_learning_rate;
        train_config.seed = derive_seed(seed, 2 * fold + 1);

        try {
            Model model = build(model_config);
            train(model, fold_train, train_config);
            const std::vector<int> predicted = predict(model, fold_val.features).classes;
            std::size_t correct = 0;
            for (std::size_t i = 0; i < predicted.size(); ++i) {
                if (predicted[i] == fold_val.labels[i]) ++correct;
            }
            result.fold_accuracies[fold] =
                static_cast<double>(correct) / static_cast<double>(fold_val.rows());
        } catch (const DivergenceError&) {
            result.fold_accuracies[fold] = 0.0;
        }
    }

    const double k = static_cast<double>(plan.k);
    result.mean_accuracy =
        std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) / k;
    double ss = 0.0;
    for (double acc : result.fold_accuracies) {
        const double delta = acc - result.mean_accuracy;
        ss += delta * delta;
    }
    result.std_accuracy = std::sqrt(ss / k);
    return result;
}

GridSearchResult grid_search(const Dataset& train_set, const GridSpec& grid, std::size_t k,
                             std::uint64_t base_seed, const TuneOptions& options) {
    grid.validate();
    if (k < 2) throw ConfigError("grid search needs k >= 2, got " + std::to_string(k));

    Rng plan_rng(fold_plan_seed(base_seed));
    const FoldPlan plan = kfold_plan(train_set, k, plan_rng);

    const std::size_t n_configs = grid.size();
    std::vector<TuneResult> results(n_configs);

    auto run_one = [&](std::size_t index) {
        results[index] = evaluate_combo(train_set, combo_at(grid, index), index, plan,
                                        config_seed(base_seed, index), options);
    };

    const std::size_t workers = std::min(std::max<std::size_t>(options.workers, 1), n_configs);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n_configs; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(n_configs);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t index = next.fetch_add(1);
                    if (index >= n_configs) break;
                    try {
                        run_one(index);
                    } catch (...) {
                        errors[index] = std::current_exception();
                    }
                }
            });
        }
        for (auto& worker : pool) worker.join();
        // Surface the lowest-index failure so parallel runs fail like
        // sequential ones.
        for (const auto& error : errors) {
            if (error) std::rethrow_exception(error);
        }
    }

    GridSearchResult search;
    search.plan = plan;
    search.ranked = std::move(results);
    std::sort(search.ranked.begin(), search.ranked.end(),
              [](const TuneResult& a, const TuneResult& b) {
                  if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
                  if (a.std_accuracy != b.std_accuracy) return a.std_accuracy < b.std_accuracy;
                  return a.config_index < b.config_index;
              });
    search.best = search.ranked.front();
    return search;
}

std::string sweep_to_csv(const std::vector<TuneResult>& ranked, std::size_t k) {
    std::vector<std::string> header = {"rank",      "config_index", "hidden_layers",
                                       "activation", "optimizer",    "batch_size"};
    for (std::size_t fold = 0; fold < k; ++fold) {
        header.push_back("fold_" + std::to_string(fold + 1) + "_accuracy");
    }
    header.push_back("mean_accuracy");
    header.push_back("std_accuracy");

    std::string csv = csv_line(header);
    std::vector<std::string> fields;
    for (std::size_t rank = 0; rank < ranked.size(); ++rank) {
        const TuneResult& result = ranked[rank];
        if (result.fold_accuracies.size() != k) {
            throw ShapeError("sweep row has " + std::to_string(result.fold_accuracies.size()) +
                             " fold accuracies, expected " + std::to_string(k));
        }
        fields.clear();
        fields.push_back(std::to_string(rank + 1));
        fields.push_back(std::to_string(result.config_index));
        fields.push_back(hidden_sizes_to_string(result.combo.hidden_sizes));
        fields.push_back(to_string(result.combo.activation));
        fields.push_back(to_string(result.combo.optimizer));
        fields.push_back(std::to_string(result.combo.batch_size));
        for (double acc : result.fold_accuracies) fields.push_back(format_double(acc));
        fields.push_back(format_double(result.mean_accuracy));
        fields.push_back(format_double(result.std_accuracy));
        csv += csv_line(fields);
    }
    return csv;
}

std::string hidden_sizes_to_string(const std::vector<std::size_t>& sizes) {
    std::string text;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (i > 0) text += '-';
        text += std::to_string(sizes[i]);
    }
    return text;
}

std::vector<std::size_t> hidden_sizes_from_string(const std::string& text) {
    std::vector<std::size_t> sizes;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('-', start);
        if (end == std::string::npos) end = text.size();
        const std::string token = text.substr(start, end - start);
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size() || value == 0) {
            throw ConfigError("invalid hidden-layer sizes '" + text + "'");
        }
        sizes.push_back(value);
        start = end + 1;
    }
    return sizes;
}

} // namespace diabnet
