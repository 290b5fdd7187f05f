// Command-line front end for the diabetes-diagnosis pipeline. Every
// subcommand is driven by one JSON config file; flags only override config
// fields, so a committed config plus a seed fully reproduces a run.

#include "diabnet/errors.hpp"
#include "diabnet/pipeline.hpp"
#include "diabnet/run_config.hpp"
#include "diabnet/tuning.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CliState {
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::string> dataset;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> batch_size;
    std::optional<std::string> hidden;
    std::optional<std::string> activation;
    std::optional<std::string> optimizer;
    std::optional<double> learning_rate;
    std::optional<std::string> best_config;
    std::optional<std::size_t> folds;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> pca_dims;
    std::string model_path;
};

void add_common_options(CLI::App* sub, CliState& state) {
    sub->add_option("--config", state.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", state.seed, "override the config seed");
    sub->add_option("--output-dir", state.output_dir, "override the output directory");
    sub->add_option("--dataset", state.dataset, "override the dataset CSV path");
    sub->callback([sub, &state] { state.command = sub->get_name(); });
}

void apply_overrides(diabnet::RunConfig& config, const CliState& state) {
    if (state.seed) config.seed = *state.seed;
    if (state.output_dir) config.output_dir = *state.output_dir;
    if (state.dataset) config.dataset_path = *state.dataset;
    if (state.batch_size) config.train.batch_size = *state.batch_size;
    if (state.hidden) config.train.hidden_sizes = diabnet::hidden_sizes_from_string(*state.hidden);
    if (state.activation) config.train.activation = diabnet::activation_from_string(*state.activation);
    if (state.optimizer) config.train.optimizer = diabnet::optimizer_from_string(*state.optimizer);
    if (state.learning_rate) config.train.learning_rate = *state.learning_rate;
    if (state.best_config) config.train.best_config = *state.best_config;
    if (state.folds) config.tune.k = *state.folds;
    if (state.workers) config.tune.workers = *state.workers;
    if (state.pca_dims) config.visualize.pca_dims = *state.pca_dims;
    if (state.epochs) {
        if (state.command == "tune") {
            config.tune.epochs = *state.epochs;
        } else {
            config.train.epochs = *state.epochs;
        }
    }
    config.validate();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"diabetes-diagnosis pipeline: preprocess, tune, train, and evaluate a "
                 "batch-normalized back-propagation network on tabular data"};
    app.require_subcommand(1);

    CliState state;

    add_common_options(app.add_subcommand("inspect", "summarize the raw dataset"), state);

    add_common_options(
        app.add_subcommand("preprocess", "write the imputed/balanced/standardized splits"),
        state);

    CLI::App* tune = app.add_subcommand("tune", "grid-search hyperparameters with k-fold CV");
    add_common_options(tune, state);
    tune->add_option("--k", state.folds, "cross-validation folds");
    tune->add_option("--workers", state.workers, "worker threads (0 = hardware)");
    tune->add_option("--epochs", state.epochs, "training epochs per fold");

    CLI::App* train = app.add_subcommand("train", "train the model on the training split");
    add_common_options(train, state);
    train->add_option("--epochs", state.epochs, "training epochs");
    train->add_option("--batch-size", state.batch_size, "mini-batch size");
    train->add_option("--hidden", state.hidden, "hidden layer sizes, e.g. 64-32-16");
    train->add_option("--activation", state.activation, "hidden activation: sigmoid | relu");
    train->add_option("--optimizer", state.optimizer, "optimizer: sgd | adam");
    train->add_option("--learning-rate", state.learning_rate, "learning rate");
    train->add_option("--best-config", state.best_config,
                      "best-config JSON from `tune` supplying the architecture");

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a trained model on the test split");
    add_common_options(evaluate, state);
    evaluate->add_option("--model", state.model_path,
                         "model JSON (default <output_dir>/model.json)");

    CLI::App* visualize = app.add_subcommand("visualize", "write PCA projection and correlations");
    add_common_options(visualize, state);
    visualize->add_option("--pca-dims", state.pca_dims, "number of principal components");

    add_common_options(
        app.add_subcommand("report", "re-render the comparison report from stored metrics"),
        state);

    CLI11_PARSE(app, argc, argv);

    try {
        diabnet::RunConfig config = diabnet::load_run_config(state.config_path);
        apply_overrides(config, state);

        diabnet::CommandOutcome outcome;
        if (state.command == "inspect") {
            outcome = diabnet::cmd_inspect(config);
        } else if (state.command == "preprocess") {
            outcome = diabnet::cmd_preprocess(config);
        } else if (state.command == "tune") {
            outcome = diabnet::cmd_tune(config);
        } else if (state.command == "train") {
            outcome = diabnet::cmd_train(config);
        } else if (state.command == "evaluate") {
            outcome = diabnet::cmd_evaluate(config, state.model_path);
        } else if (state.command == "visualize") {
            outcome = diabnet::cmd_visualize(config);
        } else if (state.command == "report") {
            outcome = diabnet::cmd_report(config);
        }

        std::cout << outcome.summary << "\n";
        for (const std::string& path : outcome.written) {
            std::cout << "wrote " << path << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
