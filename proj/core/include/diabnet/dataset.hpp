#ifndef DIABNET_DATASET_HPP
#define DIABNET_DATASET_HPP

#include "diabnet/matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diabnet {

/// Column layout of a tabular binary-classification dataset.
///
/// The raw target token equal to positive_label maps to class 1. The first
/// distinct other token establishes the negative class; any further token is
/// a label error. Columns listed in zero_as_missing encode missing values
/// as literal zeros and are candidates for mean imputation.
struct Schema {
    std::vector<std::string> feature_names;
    std::string target_name;
    std::string positive_label;
    std::vector<std::string> zero_as_missing;

    /// Throws SchemaError if the invariants do not hold.
    void validate() const;

    /// Index of a feature name, or throws SchemaError.
    std::size_t feature_index(const std::string& name) const;
};

struct Dataset {
    Matrix features;            // n x d, column order follows schema.feature_names
    std::vector<int> labels;    // length n, values in {0, 1}
    Schema schema;

    std::size_t rows() const { return features.rows(); }
    std::size_t cols() const { return features.cols(); }

    std::size_t count_label(int label) const;

    /// Row indices carrying the given label, in row order.
    std::vector<std::size_t> indices_of(int label) const;

    Dataset select(const std::vector<std::size_t>& row_indices) const;
};

/// Parses an RFC-4180-style CSV (header row, UTF-8, "." decimals) into a
/// Dataset. Feature columns are reordered to match the schema regardless of
/// their order in the file; extra columns are ignored.
Dataset load_csv(const std::string& path, const Schema& schema);

/// Same parser over in-memory text. load_csv delegates here.
Dataset parse_csv(const std::string& text, const Schema& schema, const std::string& origin);

} // namespace diabnet

#endif // DIABNET_DATASET_HPP
