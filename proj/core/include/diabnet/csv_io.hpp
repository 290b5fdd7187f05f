#ifndef DIABNET_CSV_IO_HPP
#define DIABNET_CSV_IO_HPP

#include "diabnet/matrix.hpp"

#include <string>
#include <vector>

namespace diabnet {

/// 17-significant-digit decimal form (round-trip exact). Used for every
/// numeric CSV cell the pipeline emits outside report tables.
std::string format_double(double value);

/// Fixed-point with the given number of decimals (report tables).
std::string format_fixed(double value, int decimals);

/// Escapes a CSV field per RFC 4180 when it contains separators or quotes.
std::string csv_escape(const std::string& field);

std::string csv_line(const std::vector<std::string>& fields);

/// Matrix as CSV text with the given column headers.
std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& header);

/// Writes via a temp file in the same directory plus rename, so readers never
/// observe a truncated file. Creates parent directories as needed.
void atomic_write_file(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

} // namespace diabnet

#endif // DIABNET_CSV_IO_HPP
