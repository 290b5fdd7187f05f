#include "diabnet/model_io.hpp"

#include "diabnet/csv_io.hpp"
#include "diabnet/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace diabnet {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = std::vector<double>(m.data().begin(), m.data().end());
    return j;
}

Matrix matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != rows * cols) {
        throw ParseError("model json: matrix payload of " + std::to_string(data.size()) +
                         " values does not fill " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data().begin());
    return m;
}

} // namespace

std::string model_to_json(const Model& model) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["prng"] = std::string(Rng::kAlgorithm);
    doc["input_dim"] = model.input_dim;

    json layers = json::array();
    for (const Layer& layer : model.layers) {
        json j;
        switch (layer.kind) {
            case LayerKind::Dense:
                j["kind"] = "dense";
                j["in"] = layer.dense.in_dim();
                j["out"] = layer.dense.out_dim();
                j["weights"] = matrix_to_json(layer.dense.weights);
                j["bias"] = layer.dense.bias;
                break;
            case LayerKind::BatchNorm:
                j["kind"] = "batch_norm";
                j["dim"] = layer.batch_norm.dim();
                j["gamma"] = layer.batch_norm.gamma;
                j["beta"] = layer.batch_norm.beta;
                j["running_mean"] = layer.batch_norm.running_mean;
                j["running_var"] = layer.batch_norm.running_var;
                j["epsilon"] = layer.batch_norm.epsilon;
                j["momentum"] = layer.batch_norm.momentum;
                break;
            case LayerKind::Activation:
                j["kind"] = "activation";
                j["fn"] = to_string(layer.activation.fn);
                break;
        }
        layers.push_back(std::move(j));
    }
    doc["layers"] = std::move(layers);
    return doc.dump(2) + "\n";
}

Model model_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model json: ") + e.what());
    }

    try {
        const int version = doc.at("format_version").get<int>();
        if (version != kFormatVersion) {
            throw ParseError("model json: unsupported format_version " +
                             std::to_string(version));
        }

        Model model;
        model.input_dim = doc.at("input_dim").get<std::size_t>();
        for (const json& j : doc.at("layers")) {
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "dense") {
                DenseLayer dense;
                dense.weights = matrix_from_json(j.at("weights"));
                dense.bias = j.at("bias").get<std::vector<double>>();
                if (dense.weights.rows() != j.at("in").get<std::size_t>() ||
                    dense.weights.cols() != j.at("out").get<std::size_t>() ||
                    dense.bias.size() != dense.weights.cols()) {
                    throw ParseError("model json: dense layer dims disagree with payload");
                }
                model.layers.push_back(Layer::make_dense(std::move(dense)));
            } else if (kind == "batch_norm") {
                BatchNormLayer bn;
                bn.gamma = j.at("gamma").get<std::vector<double>>();
                bn.beta = j.at("beta").get<std::vector<double>>();
                bn.running_mean = j.at("running_mean").get<std::vector<double>>();
                bn.running_var = j.at("running_var").get<std::vector<double>>();
                bn.epsilon = j.at("epsilon").get<double>();
                bn.momentum = j.at("momentum").get<double>();
                const std::size_t dim = j.at("dim").get<std::size_t>();
                if (bn.gamma.size() != dim || bn.beta.size() != dim ||
                    bn.running_mean.size() != dim || bn.running_var.size() != dim) {
                    throw ParseError("model json: batch_norm layer dims disagree with payload");
                }
                model.layers.push_back(Layer::make_batch_norm(std::move(bn)));
            } else if (kind == "activation") {
                model.layers.push_back(
                    Layer::make_activation(activation_from_string(j.at("fn").get<std::string>())));
            } else {
                throw ParseError("model json: unknown layer kind '" + kind + "'");
            }
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model json: ") + e.what());
    }
}

void save_model(const Model& model, const std::string& path) {
    atomic_write_file(path, model_to_json(model));
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open model file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

} // namespace diabnet
