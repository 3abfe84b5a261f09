#ifndef TWOFOLD_CSV_HPP
#define TWOFOLD_CSV_HPP

#include <filesystem>

#include "twofold/graph.hpp"

namespace twofold::csv {

/// Reads a header-free, comma-separated numeric matrix. Throws parse_error
/// with 1-based row/column context on ragged rows or non-numeric cells,
/// data_error when the file cannot be opened.
Matrix load_matrix(const std::filesystem::path& path);

/// Writes a matrix row-major at 17 significant digits (round-trip
/// lossless for doubles). The file is written to a temporary sibling and
/// renamed into place.
void save_matrix(const std::filesystem::path& path, const Matrix& X);

}  // namespace twofold::csv

#endif  // TWOFOLD_CSV_HPP
