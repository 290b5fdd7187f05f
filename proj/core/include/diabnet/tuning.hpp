#ifndef DIABNET_TUNING_HPP
#define DIABNET_TUNING_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/model.hpp"
#include "diabnet/preprocess.hpp"
#include "diabnet/training.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diabnet {

/// Hyperparameter space swept by grid_search. Every option list must be
/// non-empty; the search covers the full Cartesian product.
struct GridSpec {
    std::vector<std::vector<std::size_t>> hidden_layer_options;
    std::vector<Activation> activation_options;
    std::vector<Optimizer> optimizer_options;
    std::vector<std::size_t> batch_size_options;

    void validate() const;

    /// Cartesian-product cardinality.
    std::size_t size() const;
};

/// The stock 3x2x2x3 space: hidden {16-8-4, 32-16-8, 64-32-16},
/// activation {sigmoid, relu}, optimizer {sgd, adam}, batch {8, 16, 32}.
GridSpec default_grid();

/// One grid point.
struct HyperCombo {
    std::vector<std::size_t> hidden_sizes;
    Activation activation = Activation::Sigmoid;
    Optimizer optimizer = Optimizer::Sgd;
    std::size_t batch_size = 16;

    bool operator==(const HyperCombo&) const = default;
};

/// Combo at lexicographic position index: hidden varies slowest, then
/// activation, then optimizer, then batch size.
HyperCombo combo_at(const GridSpec& grid, std::size_t index);

struct TuneResult {
    HyperCombo combo;
    std::size_t config_index = 0; // lexicographic position in the grid
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0; // population convention over the folds

    bool operator==(const TuneResult&) const = default;
};

/// Sweep-wide knobs that are not part of the searched space.
struct TuneOptions {
    std::size_t epochs = 200;
    double sgd_learning_rate = 1e-2;
    double adam_learning_rate = 1e-3;
    std::size_t workers = 1; // > 1 fans combos out to a thread pool
};

/// Seed for the shared fold plan. Kept on a stream separate from every
/// config seed so the plan never aliases a training stream.
std::uint64_t fold_plan_seed(std::uint64_t base_seed);

/// Seed for one grid position. Documented mixing so a single combo can be
/// replayed outside the sweep with bit-identical fold accuracies.
std::uint64_t config_seed(std::uint64_t base_seed, std::size_t config_index);

/// Scores one combo by k-fold CV under a shared plan. Each fold trains a
/// fresh model on the out-of-fold rows and reports held-out accuracy;
/// a fold whose training diverges scores 0 instead of aborting.
TuneResult evaluate_combo(const Dataset& train_set, const HyperCombo& combo,
                          std::size_t config_index, const FoldPlan& plan,
                          std::uint64_t seed, const TuneOptions& options = {});

struct GridSearchResult {
    TuneResult best;
    std::vector<TuneResult> ranked; // mean desc, then std asc, then config index
    FoldPlan plan;
};

/// Exhaustive sweep over the grid. train_set is expected to be balanced and
/// standardized already. All combos share one fold plan; per-combo seeds
/// derive from base_seed and the combo's lexicographic index, so results are
/// identical whether combos run sequentially or on a worker pool.
GridSearchResult grid_search(const Dataset& train_set, const GridSpec& grid, std::size_t k,
                             std::uint64_t base_seed, const TuneOptions& options = {});

/// Ranked sweep as CSV: one row per combo with the hyperparameters,
/// per-fold accuracies, mean, and std.
std::string sweep_to_csv(const std::vector<TuneResult>& ranked, std::size_t k);

/// "64-32-16" <-> {64, 32, 16}; the dash form keeps CSV cells comma-free.
std::string hidden_sizes_to_string(const std::vector<std::size_t>& sizes);
std::vector<std::size_t> hidden_sizes_from_string(const std::string& text);

} // namespace diabnet

#endif // DIABNET_TUNING_HPP
