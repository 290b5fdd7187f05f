#ifndef DIABNET_MODEL_IO_HPP
#define DIABNET_MODEL_IO_HPP

#include "diabnet/model.hpp"

#include <string>

namespace diabnet {

/// Versioned JSON document for a model: format version, PRNG algorithm name,
/// layer specs, and every parameter and running statistic. Numbers are
/// emitted round-trip exact, so a reloaded model reproduces inference output
/// bitwise.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& json_text);

void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

} // namespace diabnet

#endif // DIABNET_MODEL_IO_HPP
