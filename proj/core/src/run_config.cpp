#include "diabnet/run_config.hpp"

#include "diabnet/csv_io.hpp"
#include "diabnet/errors.hpp"

#include <json.hpp>

#include <filesystem>

namespace diabnet {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
}

void reject_unknown(const json& obj, const std::string& context,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* name : allowed) {
            if (key == name) {
                known = true;
                break;
            }
        }
        if (!known) throw ConfigError("unknown key '" + key + "' in " + context);
    }
}

std::string key_context(const std::string& context, const char* key) {
    return context + "." + key;
}

void read_bool(const json& obj, const char* key, bool& out, const std::string& context) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(key_context(context, key) + " must be a boolean");
    out = v.get<bool>();
}

void read_string(const json& obj, const char* key, std::string& out, const std::string& context) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(key_context(context, key) + " must be a string");
    out = v.get<std::string>();
}

void read_double(const json& obj, const char* key, double& out, const std::string& context) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(key_context(context, key) + " must be a number");
    out = v.get<double>();
}

void read_count(const json& obj, const char* key, std::size_t& out, const std::string& context,
                std::size_t minimum = 0) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0)) {
        throw ConfigError(key_context(context, key) + " must be a non-negative integer");
    }
    const auto value = static_cast<std::size_t>(v.get<unsigned long long>());
    if (value < minimum) {
        throw ConfigError(key_context(context, key) + " must be >= " + std::to_string(minimum));
    }
    out = value;
}

void read_seed(const json& obj, const char* key, std::uint64_t& out, const std::string& context) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(key_context(context, key) + " must be a non-negative integer");
    }
    out = v.get<std::uint64_t>();
}

std::vector<std::string> string_list(const json& v, const std::string& context) {
    if (!v.is_array()) throw ConfigError(context + " must be an array of strings");
    std::vector<std::string> out;
    for (const json& item : v) {
        if (!item.is_string()) throw ConfigError(context + " must be an array of strings");
        out.push_back(item.get<std::string>());
    }
    return out;
}

std::vector<std::size_t> count_list(const json& v, const std::string& context) {
    if (!v.is_array()) throw ConfigError(context + " must be an array of positive integers");
    std::vector<std::size_t> out;
    for (const json& item : v) {
        if (!item.is_number_integer() || item.get<long long>() <= 0) {
            throw ConfigError(context + " must be an array of positive integers");
        }
        out.push_back(static_cast<std::size_t>(item.get<unsigned long long>()));
    }
    return out;
}

std::string resolve_path(const std::string& path, const std::string& base_dir) {
    if (path.empty() || base_dir.empty()) return path;
    const std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

Schema schema_from_json(const json& j, const std::string& context) {
    expect_object(j, context);
    reject_unknown(j, context, {"features", "target", "positive_label", "zero_as_missing"});
    Schema schema;
    if (!j.contains("features")) throw ConfigError(context + " is missing 'features'");
    schema.feature_names = string_list(j.at("features"), key_context(context, "features"));
    if (!j.contains("target")) throw ConfigError(context + " is missing 'target'");
    read_string(j, "target", schema.target_name, context);
    if (!j.contains("positive_label")) throw ConfigError(context + " is missing 'positive_label'");
    read_string(j, "positive_label", schema.positive_label, context);
    if (j.contains("zero_as_missing")) {
        schema.zero_as_missing =
            string_list(j.at("zero_as_missing"), key_context(context, "zero_as_missing"));
    }
    schema.validate();
    return schema;
}

GridSpec grid_from_json(const json& j, const std::string& context) {
    expect_object(j, context);
    reject_unknown(j, context, {"hidden_layers", "activations", "optimizers", "batch_sizes"});
    GridSpec grid = default_grid(); // absent keys keep the stock options
    if (j.contains("hidden_layers")) {
        const json& v = j.at("hidden_layers");
        const std::string ctx = key_context(context, "hidden_layers");
        if (!v.is_array() || v.empty()) throw ConfigError(ctx + " must be a non-empty array");
        grid.hidden_layer_options.clear();
        for (const json& item : v) grid.hidden_layer_options.push_back(count_list(item, ctx));
    }
    if (j.contains("activations")) {
        grid.activation_options.clear();
        for (const std::string& name :
             string_list(j.at("activations"), key_context(context, "activations"))) {
            grid.activation_options.push_back(activation_from_string(name));
        }
    }
    if (j.contains("optimizers")) {
        grid.optimizer_options.clear();
        for (const std::string& name :
             string_list(j.at("optimizers"), key_context(context, "optimizers"))) {
            grid.optimizer_options.push_back(optimizer_from_string(name));
        }
    }
    if (j.contains("batch_sizes")) {
        grid.batch_size_options =
            count_list(j.at("batch_sizes"), key_context(context, "batch_sizes"));
    }
    grid.validate();
    return grid;
}

} // namespace

double TrainSection::effective_learning_rate() const {
    if (learning_rate) return *learning_rate;
    return optimizer == Optimizer::Adam ? 1e-3 : 1e-2;
}

std::string RunConfig::effective_dataset_name() const {
    if (!dataset_name.empty()) return dataset_name;
    return std::filesystem::path(dataset_path).stem().string();
}

TrainConfig RunConfig::train_config(std::uint64_t train_seed) const {
    TrainConfig config;
    config.epochs = train.epochs;
    config.batch_size = train.batch_size;
    config.learning_rate = train.effective_learning_rate();
    config.optimizer = train.optimizer;
    config.seed = train_seed;
    return config;
}

void RunConfig::validate() const {
    if (version != 1) {
        throw ConfigError("unsupported config version " + std::to_string(version));
    }
    if (dataset_path.empty()) throw ConfigError("config is missing 'dataset'");
    if (output_dir.empty()) throw ConfigError("config 'output_dir' must be non-empty");
    schema.validate();
    if (!(preprocess.test_fraction > 0.0 && preprocess.test_fraction < 1.0)) {
        throw ConfigError("preprocess.test_fraction must lie in (0, 1)");
    }
    if (train.hidden_sizes.empty()) throw ConfigError("train.hidden_sizes must be non-empty");
    for (std::size_t width : train.hidden_sizes) {
        if (width == 0) throw ConfigError("train.hidden_sizes entries must be > 0");
    }
    if (train.activation == Activation::Softmax) {
        throw ConfigError("softmax is reserved for the output layer");
    }
    if (train.batch_size == 0) throw ConfigError("train.batch_size must be > 0");
    if (train.epochs == 0) throw ConfigError("train.epochs must be > 0");
    if (train.effective_learning_rate() <= 0.0) {
        throw ConfigError("train.learning_rate must be > 0");
    }
    if (tune.k < 2) throw ConfigError("tune.k must be >= 2");
    if (tune.epochs == 0) throw ConfigError("tune.epochs must be > 0");
    if (tune.sgd_learning_rate <= 0.0 || tune.adam_learning_rate <= 0.0) {
        throw ConfigError("tune learning rates must be > 0");
    }
    if (tune.grid) tune.grid->validate();
    if (baselines.knn_k == 0) throw ConfigError("baselines.knn_k must be >= 1");
    if (baselines.logistic_learning_rate <= 0.0) {
        throw ConfigError("baselines.logistic_learning_rate must be > 0");
    }
    if (baselines.logistic_epochs == 0) throw ConfigError("baselines.logistic_epochs must be > 0");
    if (visualize.pca_dims == 0) throw ConfigError("visualize.pca_dims must be >= 1");
}

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir,
                           const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError("config '" + origin + "' is not valid JSON: " + e.what());
    }
    expect_object(j, "config");
    reject_unknown(j, "config",
                   {"version", "dataset", "dataset_name", "seed", "output_dir", "schema",
                    "schema_file", "preprocess", "train", "tune", "baselines", "visualize",
                    "report"});

    RunConfig cfg;
    if (!j.contains("version")) throw ConfigError("config is missing 'version'");
    if (!j.at("version").is_number_integer()) throw ConfigError("config.version must be an integer");
    cfg.version = j.at("version").get<int>();

    read_string(j, "dataset", cfg.dataset_path, "config");
    cfg.dataset_path = resolve_path(cfg.dataset_path, base_dir);
    read_string(j, "dataset_name", cfg.dataset_name, "config");
    read_seed(j, "seed", cfg.seed, "config");
    read_string(j, "output_dir", cfg.output_dir, "config");
    cfg.output_dir = resolve_path(cfg.output_dir, base_dir);

    const bool inline_schema = j.contains("schema");
    const bool file_schema = j.contains("schema_file");
    if (inline_schema && file_schema) {
        throw ConfigError("config has both 'schema' and 'schema_file'; pick one");
    }
    if (!inline_schema && !file_schema) {
        throw ConfigError("config needs 'schema' or 'schema_file'");
    }
    if (inline_schema) {
        cfg.schema = schema_from_json(j.at("schema"), "config.schema");
    } else {
        std::string schema_path;
        read_string(j, "schema_file", schema_path, "config");
        schema_path = resolve_path(schema_path, base_dir);
        cfg.schema = schema_from_json_text(read_file(schema_path), schema_path);
    }

    if (j.contains("preprocess")) {
        const json& p = j.at("preprocess");
        expect_object(p, "config.preprocess");
        reject_unknown(p, "config.preprocess",
                       {"impute", "undersample", "standardize", "test_fraction"});
        read_bool(p, "impute", cfg.preprocess.impute, "preprocess");
        read_bool(p, "undersample", cfg.preprocess.undersample, "preprocess");
        read_bool(p, "standardize", cfg.preprocess.standardize, "preprocess");
        read_double(p, "test_fraction", cfg.preprocess.test_fraction, "preprocess");
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        expect_object(t, "config.train");
        reject_unknown(t, "config.train",
                       {"hidden_sizes", "activation", "optimizer", "batch_size", "learning_rate",
                        "epochs", "best_config"});
        if (t.contains("hidden_sizes")) {
            cfg.train.hidden_sizes = count_list(t.at("hidden_sizes"), "train.hidden_sizes");
        }
        std::string name;
        read_string(t, "activation", name, "train");
        if (!name.empty()) cfg.train.activation = activation_from_string(name);
        name.clear();
        read_string(t, "optimizer", name, "train");
        if (!name.empty()) cfg.train.optimizer = optimizer_from_string(name);
        read_count(t, "batch_size", cfg.train.batch_size, "train", 1);
        if (t.contains("learning_rate")) {
            double lr = 0.0;
            read_double(t, "learning_rate", lr, "train");
            cfg.train.learning_rate = lr;
        }
        read_count(t, "epochs", cfg.train.epochs, "train", 1);
        read_string(t, "best_config", cfg.train.best_config, "train");
        cfg.train.best_config = resolve_path(cfg.train.best_config, base_dir);
    }

    if (j.contains("tune")) {
        const json& t = j.at("tune");
        expect_object(t, "config.tune");
        reject_unknown(t, "config.tune",
                       {"k", "epochs", "sgd_learning_rate", "adam_learning_rate", "workers",
                        "grid"});
        read_count(t, "k", cfg.tune.k, "tune", 2);
        read_count(t, "epochs", cfg.tune.epochs, "tune", 1);
        read_double(t, "sgd_learning_rate", cfg.tune.sgd_learning_rate, "tune");
        read_double(t, "adam_learning_rate", cfg.tune.adam_learning_rate, "tune");
        read_count(t, "workers", cfg.tune.workers, "tune");
        if (t.contains("grid")) cfg.tune.grid = grid_from_json(t.at("grid"), "config.tune.grid");
    }

    if (j.contains("baselines")) {
        const json& b = j.at("baselines");
        expect_object(b, "config.baselines");
        reject_unknown(b, "config.baselines",
                       {"knn", "knn_k", "logistic", "logistic_learning_rate", "logistic_epochs"});
        read_bool(b, "knn", cfg.baselines.knn, "baselines");
        read_count(b, "knn_k", cfg.baselines.knn_k, "baselines", 1);
        read_bool(b, "logistic", cfg.baselines.logistic, "baselines");
        read_double(b, "logistic_learning_rate", cfg.baselines.logistic_learning_rate,
                    "baselines");
        read_count(b, "logistic_epochs", cfg.baselines.logistic_epochs, "baselines", 1);
    }

    if (j.contains("visualize")) {
        const json& v = j.at("visualize");
        expect_object(v, "config.visualize");
        reject_unknown(v, "config.visualize", {"pca_dims"});
        read_count(v, "pca_dims", cfg.visualize.pca_dims, "visualize", 1);
    }

    if (j.contains("report")) {
        const json& r = j.at("report");
        expect_object(r, "config.report");
        reject_unknown(r, "config.report", {"include_references"});
        read_bool(r, "include_references", cfg.report.include_references, "report");
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    const std::string text = read_file(path);
    const std::string base_dir = std::filesystem::path(path).parent_path().string();
    return parse_run_config(text, base_dir, path);
}

Schema schema_from_json_text(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError("schema '" + origin + "' is not valid JSON: " + e.what());
    }
    return schema_from_json(j, "schema");
}

std::string schema_to_json_text(const Schema& schema) {
    json j;
    j["features"] = schema.feature_names;
    j["target"] = schema.target_name;
    j["positive_label"] = schema.positive_label;
    j["zero_as_missing"] = schema.zero_as_missing;
    return j.dump(2) + "\n";
}

} // namespace diabnet
