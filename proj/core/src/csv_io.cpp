#include "diabnet/csv_io.hpp"

#include "diabnet/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace diabnet {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string format_fixed(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string escaped = "\"";
    for (char ch : field) {
        if (ch == '"') escaped += "\"\"";
        else escaped += ch;
    }
    escaped += '"';
    return escaped;
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ',';
        line += csv_escape(fields[i]);
    }
    line += '\n';
    return line;
}

std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header) {
    if (!header.empty() && header.size() != m.cols()) {
        throw ShapeError("matrix_to_csv: " + std::to_string(header.size()) +
                         " header fields for " + m.shape_str() + " matrix");
    }
    std::string out;
    if (!header.empty()) out += csv_line(header);
    std::vector<std::string> fields(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) fields[c] = format_double(m(r, c));
        out += csv_line(fields);
    }
    return out;
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path temp = target.string() + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write file '" + temp.string() + "'");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw Error("short write to '" + temp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        throw Error("cannot rename '" + temp.string() + "' to '" + target.string() +
                    "': " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace diabnet
