#ifndef DIABNET_RUN_CONFIG_HPP
#define DIABNET_RUN_CONFIG_HPP

#include "diabnet/dataset.hpp"
#include "diabnet/model.hpp"
#include "diabnet/training.hpp"
#include "diabnet/tuning.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diabnet {

/// Preprocessing toggles; the pipeline applies the enabled steps in the
/// fixed order undersample -> holdout split -> impute -> standardize, the
/// latter two fitted on the training split only.
struct PreprocessSection {
    bool impute = true;
    bool undersample = true;
    bool standardize = true;
    double test_fraction = 0.2;
};

/// Hyperparameters for cmd_train. When best_config names a file written by
/// cmd_tune, the architecture fields are taken from there instead.
struct TrainSection {
    std::vector<std::size_t> hidden_sizes = {64, 32, 16};
    Activation activation = Activation::Sigmoid;
    Optimizer optimizer = Optimizer::Adam;
    std::size_t batch_size = 16;
    std::optional<double> learning_rate; // default depends on the optimizer
    std::size_t epochs = 200;
    std::string best_config;

    double effective_learning_rate() const;
};

struct TuneSection {
    std::size_t k = 5;
    std::size_t epochs = 200;
    double sgd_learning_rate = 1e-2;
    double adam_learning_rate = 1e-3;
    std::size_t workers = 0; // 0 = hardware concurrency
    std::optional<GridSpec> grid; // unset = default_grid()
};

struct BaselinesSection {
    bool knn = true;
    std::size_t knn_k = 5;
    bool logistic = true;
    double logistic_learning_rate = 0.1;
    std::size_t logistic_epochs = 500;
};

struct VisualizeSection {
    std::size_t pca_dims = 2;
};

struct ReportSection {
    bool include_references = true;
};

/// One JSON document drives every command. Unknown keys are rejected at
/// every nesting level so typos fail loudly instead of silently reverting
/// to defaults. Relative paths resolve against the config file's directory.
struct RunConfig {
    int version = 1;
    std::string dataset_path;
    std::string dataset_name; // empty = stem of dataset_path
    std::uint64_t seed = 42;
    std::string output_dir = "out";
    Schema schema;
    PreprocessSection preprocess;
    TrainSection train;
    TuneSection tune;
    BaselinesSection baselines;
    VisualizeSection visualize;
    ReportSection report;

    void validate() const;

    /// dataset_name, or the dataset file's stem when unset.
    std::string effective_dataset_name() const;

    /// TrainConfig assembled from the train section and the run seed.
    TrainConfig train_config(std::uint64_t train_seed) const;
};

/// Parses a config document. base_dir ("" = leave paths untouched) anchors
/// relative dataset/schema/best_config/output paths.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir,
                           const std::string& origin);

/// Reads and parses path, resolving relative paths against its directory.
RunConfig load_run_config(const std::string& path);

/// Schema helpers shared with standalone schema files.
Schema schema_from_json_text(const std::string& json_text, const std::string& origin);
std::string schema_to_json_text(const Schema& schema);

} // namespace diabnet

#endif // DIABNET_RUN_CONFIG_HPP
