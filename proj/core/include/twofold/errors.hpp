#ifndef TWOFOLD_ERRORS_HPP
#define TWOFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace twofold {

// Error taxonomy, mirrored by the CLI exit codes: config (2), data (3),
// numeric (4).

/// Bad configuration values or unusable invocation (invariant violations
/// in user-supplied settings, refusals such as a non-empty output dir).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Problems with input data: missing files, malformed content, shape
/// mismatches between otherwise valid objects.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension mismatch between operands.
struct dimension_error : data_error {
    explicit dimension_error(const std::string& msg) : data_error(msg) {}
};

/// Malformed file content; message carries row/column context.
struct parse_error : data_error {
    explicit parse_error(const std::string& msg) : data_error(msg) {}
};

/// Structurally invalid graph input (asymmetric weights, negative weights,
/// nonzero diagonal).
struct invalid_graph_error : data_error {
    explicit invalid_graph_error(const std::string& msg) : data_error(msg) {}
};

/// Numerical failure: solver divergence, non-convergence of a
/// factorization, non-finite iterates.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace twofold

#endif  // TWOFOLD_ERRORS_HPP
