#include "diabnet/dataset.hpp"

#include "diabnet/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace diabnet {

void Schema::validate() const {
    if (feature_names.empty()) {
        throw SchemaError("schema has no feature columns");
    }
    if (target_name.empty()) {
        throw SchemaError("schema has no target column");
    }
    for (const auto& name : feature_names) {
        if (name == target_name) {
            throw SchemaError("target column '" + target_name + "' also listed as a feature");
        }
    }
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        for (std::size_t j = i + 1; j < feature_names.size(); ++j) {
            if (feature_names[i] == feature_names[j]) {
                throw SchemaError("duplicate feature name '" + feature_names[i] + "'");
            }
        }
    }
    for (const auto& name : zero_as_missing) {
        if (std::find(feature_names.begin(), feature_names.end(), name) == feature_names.end()) {
            throw SchemaError("zero_as_missing column '" + name + "' is not a feature");
        }
    }
}

std::size_t Schema::feature_index(const std::string& name) const {
    const auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end()) {
        throw SchemaError("unknown feature '" + name + "'");
    }
    return static_cast<std::size_t>(it - feature_names.begin());
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> Dataset::indices_of(int label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) out.push_back(i);
    }
    return out;
}

Dataset Dataset::select(const std::vector<std::size_t>& row_indices) const {
    Dataset out;
    out.features = features.select_rows(row_indices);
    out.labels.reserve(row_indices.size());
    for (std::size_t idx : row_indices) out.labels.push_back(labels[idx]);
    out.schema = schema;
    return out;
}

namespace {

// One CSV record, honoring quoted fields with "" escapes. Returns the fields
// and advances pos past the record's terminating newline.
std::vector<std::string> read_record(const std::string& text, std::size_t& pos) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    while (pos < text.size()) {
        const char ch = text[pos];
        if (in_quotes) {
            if (ch == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            ++pos;
            break;
        } else if (ch != '\r') {
            field.push_back(ch);
        }
        ++pos;
    }
    fields.push_back(std::move(field));
    return fields;
}

double parse_cell(const std::string& cell, std::size_t line, const std::string& column,
                  const std::string& origin) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end) {
        throw ParseError(origin + ": line " + std::to_string(line) + ", column '" + column +
                         "': cannot parse '" + cell + "' as a number");
    }
    return value;
}

} // namespace

Dataset parse_csv(const std::string& text, const Schema& schema, const std::string& origin) {
    schema.validate();

    std::size_t pos = 0;
    if (text.empty()) {
        throw ParseError(origin + ": file is empty (missing header row)");
    }
    const std::vector<std::string> header = read_record(text, pos);

    auto column_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw SchemaError(origin + ": header is missing column '" + name + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };

    std::vector<std::size_t> feature_cols;
    feature_cols.reserve(schema.feature_names.size());
    for (const auto& name : schema.feature_names) feature_cols.push_back(column_of(name));
    const std::size_t target_col = column_of(schema.target_name);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::string negative_token;
    bool have_negative = false;

    std::size_t line = 1;
    while (pos < text.size()) {
        ++line;
        const std::vector<std::string> record = read_record(text, pos);
        if (record.size() == 1 && record[0].empty()) continue; // blank line
        if (record.size() < header.size()) {
            throw ParseError(origin + ": line " + std::to_string(line) + " has " +
                             std::to_string(record.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }

        std::vector<double> row(feature_cols.size());
        for (std::size_t f = 0; f < feature_cols.size(); ++f) {
            row[f] = parse_cell(record[feature_cols[f]], line, schema.feature_names[f], origin);
        }
        rows.push_back(std::move(row));

        const std::string& token = record[target_col];
        if (token == schema.positive_label) {
            labels.push_back(1);
        } else if (have_negative && token == negative_token) {
            labels.push_back(0);
        } else if (!have_negative) {
            negative_token = token;
            have_negative = true;
            labels.push_back(0);
        } else {
            throw LabelError(origin + ": line " + std::to_string(line) +
                             ": unknown target token '" + token + "' (expected '" +
                             schema.positive_label + "' or '" + negative_token + "')");
        }
    }

    Dataset ds;
    ds.features = rows.empty() ? Matrix(0, schema.feature_names.size())
                               : Matrix::from_rows(rows);
    ds.labels = std::move(labels);
    ds.schema = schema;
    check_finite(ds.features, origin);
    return ds;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open dataset file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), schema, path);
}

} // namespace diabnet
