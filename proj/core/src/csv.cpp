#include "twofold/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace twofold::csv {

namespace {

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end) {
        throw parse_error("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                          ", column " + std::to_string(col));
    }
    return value;
}

}  // namespace

Matrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) {
            break;  // trailing newline
        }
        std::vector<double> row;
        std::size_t start = 0;
        std::size_t col = 0;
        while (true) {
            ++col;
            const std::size_t comma = line.find(',', start);
            const std::string cell = line.substr(start, comma == std::string::npos
                                                            ? std::string::npos
                                                            : comma - start);
            row.push_back(parse_cell(cell, lineno, col));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw parse_error("ragged row at line " + std::to_string(lineno) + ": expected " +
                              std::to_string(rows.front().size()) + " cells, got " +
                              std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw parse_error("empty matrix file " + path.string());
    }
    Matrix X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return X;
}

void save_matrix(const std::filesystem::path& path, const Matrix& X) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw data_error("cannot write " + tmp.string());
        }
        char buf[64];
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", X(i, j));
                out << buf;
                if (j + 1 < X.cols()) {
                    out << ',';
                }
            }
            out << '\n';
        }
        if (!out) {
            throw data_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw data_error("cannot move " + tmp.string() + " to " + path.string() + ": " +
                         ec.message());
    }
}

}  // namespace twofold::csv
