#include "diabnet/pipeline.hpp"

#include "diabnet/baselines.hpp"
#include "diabnet/csv_io.hpp"
#include "diabnet/errors.hpp"
#include "diabnet/eval.hpp"
#include "diabnet/model_io.hpp"
#include "diabnet/pca.hpp"
#include "diabnet/rng.hpp"
#include "diabnet/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <thread>

namespace diabnet {

using nlohmann::json;

namespace {

// Purpose tags for seed streams derived from the run seed. Each pipeline
// stage draws from its own stream, so adding or removing one stage never
// shifts the randomness of another.
constexpr std::uint64_t kUndersampleStream = 0x756e6465; // "unde"
constexpr std::uint64_t kSplitStream = 0x73706c69;       // "spli"
constexpr std::uint64_t kModelStream = 0x6d6f6465;       // "mode"
constexpr std::uint64_t kTrainStream = 0x74726169;       // "trai"

constexpr const char* kBpnnName = "BPNN + BatchNorm";

std::string out_path(const RunConfig& config, const std::string& file) {
    return (std::filesystem::path(config.output_dir) / file).string();
}

void write_output(CommandOutcome& outcome, const std::string& path, const std::string& contents) {
    atomic_write_file(path, contents);
    outcome.written.push_back(path);
}

/// Features plus the label column, 17-significant-digit cells.
std::string dataset_to_csv(const Dataset& ds) {
    std::vector<std::string> header = ds.schema.feature_names;
    header.push_back(ds.schema.target_name);
    std::string csv = csv_line(header);
    std::vector<std::string> fields(ds.cols() + 1);
    for (std::size_t r = 0; r < ds.rows(); ++r) {
        for (std::size_t c = 0; c < ds.cols(); ++c) fields[c] = format_double(ds.features(r, c));
        fields[ds.cols()] = std::to_string(ds.labels[r]);
        csv += csv_line(fields);
    }
    return csv;
}

/// Correlation matrix with a leading column naming each row's feature.
std::string correlation_to_csv(const Matrix& corr, const std::vector<std::string>& names) {
    std::vector<std::string> header = {"feature"};
    header.insert(header.end(), names.begin(), names.end());
    std::string csv = csv_line(header);
    std::vector<std::string> fields(names.size() + 1);
    for (std::size_t r = 0; r < corr.rows(); ++r) {
        fields[0] = names[r];
        for (std::size_t c = 0; c < corr.cols(); ++c) fields[c + 1] = format_double(corr(r, c));
        csv += csv_line(fields);
    }
    return csv;
}

std::string count_summary(const Dataset& ds) {
    return std::to_string(ds.rows()) + " rows, " + std::to_string(ds.cols()) + " features, " +
           std::to_string(ds.count_label(1)) + " positive / " +
           std::to_string(ds.count_label(0)) + " negative";
}

MetricTriple evaluate_predictions(const std::vector<int>& predictions,
                                  const std::vector<int>& labels, ConfusionMatrix* cm_out) {
    const ConfusionMatrix cm = confusion(predictions, labels);
    if (cm_out != nullptr) *cm_out = cm;
    return metrics(cm);
}

json triple_to_json(const MetricTriple& triple) {
    json j;
    j["accuracy"] = triple.accuracy ? json(*triple.accuracy) : json(nullptr);
    j["sensitivity"] = triple.sensitivity ? json(*triple.sensitivity) : json(nullptr);
    j["specificity"] = triple.specificity ? json(*triple.specificity) : json(nullptr);
    return j;
}

std::optional<double> optional_from_json(const json& v, const std::string& context) {
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw ParseError(context + " must be a number or null");
    return v.get<double>();
}

} // namespace

PreparedData prepare(const RunConfig& config) {
    Dataset data = load_csv(config.dataset_path, config.schema);
    PreparedData prepared;
    prepared.raw_rows = data.rows();

    if (config.preprocess.undersample) {
        Rng rng(derive_seed(config.seed, kUndersampleStream));
        data = undersample(data, rng);
    }
    prepared.balanced_rows = data.rows();

    Rng split_rng(derive_seed(config.seed, kSplitStream));
    auto [train_split, test_split] = holdout_split(data, config.preprocess.test_fraction, split_rng);
    prepared.train = std::move(train_split);
    prepared.test = std::move(test_split);

    if (config.preprocess.impute) {
        auto [imputed, params] = impute_missing(prepared.train);
        prepared.train = std::move(imputed);
        prepared.impute = std::move(params);
        prepared.test = impute_missing(prepared.test, prepared.impute);
    }
    if (config.preprocess.standardize) {
        prepared.scaler = fit_standardizer(prepared.train);
        prepared.train = apply_standardizer(prepared.train, prepared.scaler);
        prepared.test = apply_standardizer(prepared.test, prepared.scaler);
    }
    return prepared;
}

Dataset prepare_balanced(const RunConfig& config) {
    Dataset data = load_csv(config.dataset_path, config.schema);
    if (config.preprocess.undersample) {
        Rng rng(derive_seed(config.seed, kUndersampleStream));
        data = undersample(data, rng);
    }
    if (config.preprocess.impute) {
        data = impute_missing(data).first;
    }
    return data;
}

CommandOutcome cmd_inspect(const RunConfig& config) {
    const Dataset data = load_csv(config.dataset_path, config.schema);
    CommandOutcome outcome;
    outcome.summary = config.dataset_path + ": " + count_summary(data);
    if (data.rows() == 0) return outcome;

    const ColumnStats stats = column_stats(data.features);
    outcome.summary += "\nfeature,mean,std";
    for (std::size_t c = 0; c < data.cols(); ++c) {
        outcome.summary += "\n" + data.schema.feature_names[c] + "," +
                           format_fixed(stats.means[c], 4) + "," +
                           format_fixed(stats.stds[c], 4);
    }
    const Matrix corr = pearson_correlation(data.features);
    write_output(outcome, out_path(config, "correlation.csv"),
                 correlation_to_csv(corr, data.schema.feature_names));
    return outcome;
}

CommandOutcome cmd_preprocess(const RunConfig& config) {
    const PreparedData prepared = prepare(config);
    CommandOutcome outcome;

    write_output(outcome, out_path(config, "train.csv"), dataset_to_csv(prepared.train));
    write_output(outcome, out_path(config, "test.csv"), dataset_to_csv(prepared.test));

    json params;
    params["version"] = 1;
    if (config.preprocess.impute && !prepared.impute.columns.empty()) {
        json impute;
        std::vector<std::string> names;
        for (std::size_t column : prepared.impute.columns) {
            names.push_back(config.schema.feature_names[column]);
        }
        impute["columns"] = names;
        impute["means"] = prepared.impute.means;
        params["impute"] = impute;
    } else {
        params["impute"] = nullptr;
    }
    if (config.preprocess.standardize) {
        json scaler;
        scaler["means"] = prepared.scaler.means;
        scaler["stds"] = prepared.scaler.stds;
        params["scaler"] = scaler;
    } else {
        params["scaler"] = nullptr;
    }
    params["rows"] = {{"raw", prepared.raw_rows},
                      {"balanced", prepared.balanced_rows},
                      {"train", prepared.train.rows()},
                      {"test", prepared.test.rows()}};
    write_output(outcome, out_path(config, "preprocess_params.json"), params.dump(2) + "\n");

    outcome.summary = "train: " + count_summary(prepared.train) +
                      "\ntest: " + count_summary(prepared.test);
    return outcome;
}

CommandOutcome cmd_tune(const RunConfig& config) {
    const PreparedData prepared = prepare(config);
    const GridSpec grid = config.tune.grid ? *config.tune.grid : default_grid();

    TuneOptions options;
    options.epochs = config.tune.epochs;
    options.sgd_learning_rate = config.tune.sgd_learning_rate;
    options.adam_learning_rate = config.tune.adam_learning_rate;
    options.workers = config.tune.workers > 0
                          ? config.tune.workers
                          : std::max(1u, std::thread::hardware_concurrency());

    const GridSearchResult result =
        grid_search(prepared.train, grid, config.tune.k, config.seed, options);

    CommandOutcome outcome;
    write_output(outcome, out_path(config, "sweep.csv"), sweep_to_csv(result.ranked, config.tune.k));

    json best;
    best["version"] = 1;
    best["hidden_sizes"] = result.best.combo.hidden_sizes;
    best["activation"] = to_string(result.best.combo.activation);
    best["optimizer"] = to_string(result.best.combo.optimizer);
    best["batch_size"] = result.best.combo.batch_size;
    best["config_index"] = result.best.config_index;
    best["fold_accuracies"] = result.best.fold_accuracies;
    best["mean_accuracy"] = result.best.mean_accuracy;
    best["std_accuracy"] = result.best.std_accuracy;
    best["cv_folds"] = config.tune.k;
    best["base_seed"] = config.seed;
    write_output(outcome, out_path(config, "best_config.json"), best.dump(2) + "\n");

    outcome.summary = "evaluated " + std::to_string(result.ranked.size()) +
                      " configurations; best: hidden " +
                      hidden_sizes_to_string(result.best.combo.hidden_sizes) + ", " +
                      to_string(result.best.combo.activation) + ", " +
                      to_string(result.best.combo.optimizer) + ", batch " +
                      std::to_string(result.best.combo.batch_size) + " (mean CV accuracy " +
                      format_fixed(result.best.mean_accuracy, 4) + ")";
    return outcome;
}

namespace {

/// config.train with the architecture fields replaced from a cmd_tune
/// best-config file when one is configured.
TrainSection resolve_train_section(const RunConfig& config) {
    TrainSection section = config.train;
    if (section.best_config.empty()) return section;

    json j;
    try {
        j = json::parse(read_file(section.best_config));
    } catch (const json::exception& e) {
        throw ParseError("best-config '" + section.best_config + "' is not valid JSON: " +
                         e.what());
    }
    if (!j.is_object()) throw ParseError("best-config must be a JSON object");
    try {
        if (j.at("version").get<int>() != 1) {
            throw ParseError("unsupported best-config version");
        }
        section.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
        section.activation = activation_from_string(j.at("activation").get<std::string>());
        section.optimizer = optimizer_from_string(j.at("optimizer").get<std::string>());
        section.batch_size = j.at("batch_size").get<std::size_t>();
    } catch (const json::exception& e) {
        throw ParseError("best-config '" + section.best_config + "': " + e.what());
    }
    return section;
}

} // namespace

CommandOutcome cmd_train(const RunConfig& config) {
    const PreparedData prepared = prepare(config);
    const TrainSection section = resolve_train_section(config);

    ModelConfig model_config;
    model_config.input_dim = prepared.train.cols();
    model_config.hidden_sizes = section.hidden_sizes;
    model_config.activation = section.activation;
    model_config.seed = derive_seed(config.seed, kModelStream);

    TrainConfig train_config;
    train_config.epochs = section.epochs;
    train_config.batch_size = section.batch_size;
    train_config.learning_rate = section.effective_learning_rate();
    train_config.optimizer = section.optimizer;
    train_config.seed = derive_seed(config.seed, kTrainStream);

    Model model = build(model_config);
    const TrainHistory history = train(model, prepared.train, train_config);

    CommandOutcome outcome;
    write_output(outcome, out_path(config, "model.json"), model_to_json(model));

    std::string history_csv = csv_line({"epoch", "loss", "accuracy"});
    for (std::size_t epoch = 0; epoch < history.losses.size(); ++epoch) {
        history_csv += csv_line({std::to_string(epoch + 1), format_double(history.losses[epoch]),
                                 format_double(history.accuracies[epoch])});
    }
    write_output(outcome, out_path(config, "history.csv"), history_csv);

    outcome.summary = "trained hidden " + hidden_sizes_to_string(section.hidden_sizes) + ", " +
                      to_string(section.activation) + ", " + to_string(section.optimizer) +
                      ", batch " + std::to_string(section.batch_size) + " for " +
                      std::to_string(train_config.epochs) + " epochs; final loss " +
                      format_fixed(history.losses.back(), 4) + ", training accuracy " +
                      format_fixed(history.accuracies.back(), 4);
    return outcome;
}

CommandOutcome cmd_evaluate(const RunConfig& config, const std::string& model_path) {
    const PreparedData prepared = prepare(config);
    const std::string path = model_path.empty() ? out_path(config, "model.json") : model_path;
    const Model model = load_model(path);
    if (model.input_dim != prepared.test.cols()) {
        throw ShapeError("model expects " + std::to_string(model.input_dim) +
                         " features but the dataset has " + std::to_string(prepared.test.cols()));
    }

    const std::string dataset_name = config.effective_dataset_name();
    std::vector<EvalEntry> entries;
    json measured = json::array();

    auto add_entry = [&](const std::string& model_name, const std::string& ds_name,
                         const std::vector<int>& predictions, const std::vector<int>& labels) {
        ConfusionMatrix cm;
        const MetricTriple triple = evaluate_predictions(predictions, labels, &cm);
        entries.push_back({model_name, ds_name, MetricSource::Measured, triple});
        json entry;
        entry["model"] = model_name;
        entry["dataset"] = ds_name;
        entry["source"] = to_string(MetricSource::Measured);
        entry["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
        entry["metrics"] = triple_to_json(triple);
        measured.push_back(entry);
        return triple;
    };

    const MetricTriple test_triple =
        add_entry(kBpnnName, dataset_name, predict(model, prepared.test.features).classes,
                  prepared.test.labels);

    if (config.baselines.knn) {
        const KnnModel knn = knn_fit(prepared.train, config.baselines.knn_k);
        add_entry("kNN", dataset_name, knn_predict(knn, prepared.test.features),
                  prepared.test.labels);
    }
    if (config.baselines.logistic) {
        const LogisticModel logistic =
            logistic_fit(prepared.train, config.baselines.logistic_learning_rate,
                         config.baselines.logistic_epochs);
        add_entry("Logistic Regression", dataset_name,
                  logistic_predict(logistic, prepared.test.features).first,
                  prepared.test.labels);
    }

    // Informational training-split row; train-set optimism is expected.
    add_entry(kBpnnName, dataset_name + "-train",
              predict(model, prepared.train.features).classes, prepared.train.labels);

    CommandOutcome outcome;
    json metrics_doc;
    metrics_doc["version"] = 1;
    metrics_doc["dataset"] = dataset_name;
    metrics_doc["entries"] = measured;
    write_output(outcome, out_path(config, "metrics.json"), metrics_doc.dump(2) + "\n");

    const std::vector<EvalEntry> references =
        config.report.include_references ? reference_entries() : std::vector<EvalEntry>{};
    const ReportDocument report = render_report(entries, references);
    write_output(outcome, out_path(config, "report.md"), report.markdown);
    write_output(outcome, out_path(config, "report.csv"), report.csv);

    auto show = [](const std::optional<double>& v) { return v ? format_fixed(*v, 4) : "-"; };
    outcome.summary = "test split (" + std::to_string(prepared.test.rows()) + " rows): accuracy " +
                      show(test_triple.accuracy) + ", sensitivity " +
                      show(test_triple.sensitivity) + ", specificity " +
                      show(test_triple.specificity);
    return outcome;
}

CommandOutcome cmd_visualize(const RunConfig& config) {
    Dataset data = prepare_balanced(config);
    if (data.rows() == 0) throw EmptyInputError("nothing to visualize: dataset has no rows");

    const Matrix corr = pearson_correlation(data.features);
    if (config.preprocess.standardize) {
        const ScalerParams scaler = fit_standardizer(data);
        data = apply_standardizer(data, scaler);
    }
    const PcaResult pca = pca_fit_project(data, config.visualize.pca_dims);

    CommandOutcome outcome;
    std::vector<std::string> header;
    for (std::size_t c = 0; c < config.visualize.pca_dims; ++c) {
        header.push_back("pc" + std::to_string(c + 1));
    }
    header.push_back("label");
    std::string pca_csv = csv_line(header);
    std::vector<std::string> fields(config.visualize.pca_dims + 1);
    for (std::size_t r = 0; r < pca.projection.rows(); ++r) {
        for (std::size_t c = 0; c < pca.projection.cols(); ++c) {
            fields[c] = format_double(pca.projection(r, c));
        }
        fields[config.visualize.pca_dims] = std::to_string(data.labels[r]);
        pca_csv += csv_line(fields);
    }
    write_output(outcome, out_path(config, "pca.csv"), pca_csv);

    std::string variance_csv = csv_line({"component", "explained_variance"});
    for (std::size_t c = 0; c < pca.explained_variance.size(); ++c) {
        variance_csv += csv_line({std::to_string(c + 1), format_double(pca.explained_variance[c])});
    }
    write_output(outcome, out_path(config, "pca_variance.csv"), variance_csv);

    write_output(outcome, out_path(config, "correlation_balanced.csv"),
                 correlation_to_csv(corr, data.schema.feature_names));

    outcome.summary = "projected " + std::to_string(data.rows()) + " rows onto " +
                      std::to_string(config.visualize.pca_dims) + " principal components";
    return outcome;
}

CommandOutcome cmd_report(const RunConfig& config) {
    std::vector<EvalEntry> entries;
    const std::string metrics_path = out_path(config, "metrics.json");
    bool have_metrics = std::filesystem::exists(metrics_path);
    if (have_metrics) {
        json doc;
        try {
            doc = json::parse(read_file(metrics_path));
        } catch (const json::exception& e) {
            throw ParseError("metrics '" + metrics_path + "' is not valid JSON: " + e.what());
        }
        try {
            if (doc.at("version").get<int>() != 1) {
                throw ParseError("unsupported metrics version in '" + metrics_path + "'");
            }
            for (const json& entry : doc.at("entries")) {
                EvalEntry e;
                e.model = entry.at("model").get<std::string>();
                e.dataset = entry.at("dataset").get<std::string>();
                const std::string source = entry.at("source").get<std::string>();
                if (source == to_string(MetricSource::Measured)) {
                    e.source = MetricSource::Measured;
                } else if (source == to_string(MetricSource::Literature)) {
                    e.source = MetricSource::Literature;
                } else {
                    throw ParseError("unknown metric source '" + source + "'");
                }
                const json& m = entry.at("metrics");
                e.values.accuracy = optional_from_json(m.at("accuracy"), "accuracy");
                e.values.sensitivity = optional_from_json(m.at("sensitivity"), "sensitivity");
                e.values.specificity = optional_from_json(m.at("specificity"), "specificity");
                entries.push_back(std::move(e));
            }
        } catch (const json::exception& e) {
            throw ParseError("metrics '" + metrics_path + "': " + e.what());
        }
    }

    const std::vector<EvalEntry> references =
        config.report.include_references ? reference_entries() : std::vector<EvalEntry>{};
    const ReportDocument report = render_report(entries, references);

    CommandOutcome outcome;
    write_output(outcome, out_path(config, "report.md"), report.markdown);
    write_output(outcome, out_path(config, "report.csv"), report.csv);
    outcome.summary = have_metrics
                          ? "rendered report from " + metrics_path
                          : "no metrics file found; rendered reference rows only";
    return outcome;
}

} // namespace diabnet
