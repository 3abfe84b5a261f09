#ifndef TWOFOLD_GRAPH_HPP
#define TWOFOLD_GRAPH_HPP

#include <Eigen/Core>

#include "twofold/errors.hpp"

namespace twofold {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected weighted graph held as a dense adjacency matrix.
/// Invariants: symmetric, nonnegative, zero diagonal.
struct Graph {
    int n = 0;
    Matrix weights;

    /// Validating constructor; throws invalid_graph_error on violation.
    static Graph from_weights(Matrix w);
};

/// Throws invalid_graph_error unless g satisfies the Graph invariants.
void validate_graph(const Graph& g);

/// Combinatorial graph Laplacian L = D - W. Symmetric, PSD, zero row sums,
/// nonpositive off-diagonals.
struct Laplacian {
    int n = 0;
    Matrix matrix;
};

/// Free lower-triangular off-diagonal entries of a Laplacian, ordered
/// lexicographically over pairs (i,j), i<j. Entry (i,j) equals L_ij = -w_ij.
/// The expansion to vec(L) and the diagonal extraction are realized by
/// vech_expand / vech_degree below; the corresponding dense operator
/// matrices are never materialized.
struct LaplacianVech {
    int n = 0;
    Vector ell;
};

/// Eigen-decomposition of a Laplacian: L = U diag(lambda) U^T with
/// eigenvalues ascending (graph frequencies) and orthonormal U.
struct SpectralDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Number of unordered node pairs, n*(n-1)/2.
inline Eigen::Index pair_count(int n) {
    return static_cast<Eigen::Index>(n) * (n - 1) / 2;
}

/// Position of pair (i,j), i<j, in the lexicographic vech ordering.
inline Eigen::Index pair_index(int i, int j, int n) {
    return static_cast<Eigen::Index>(i) * n - static_cast<Eigen::Index>(i) * (i + 1) / 2 +
           (j - i - 1);
}

/// L = D - W. Validates the graph and throws invalid_graph_error on
/// asymmetric or negative weights.
Laplacian build_laplacian(const Graph& g);

/// Expands ell into the full Laplacian: off-diagonals from ell, diagonal
/// set so every row sums to exactly zero.
Laplacian vech_expand(const LaplacianVech& v);

/// Extracts ell (strict upper triangle, lexicographic) from a Laplacian.
LaplacianVech vech_from_laplacian(const Laplacian& L);

/// Diagonal of vech_expand(v): degree vector d_i = -(sum of incident entries).
Vector vech_degree(const LaplacianVech& v);

/// Adjoint of the degree-extraction map: entry for pair (i,j) is -(d_i + d_j).
Vector vech_adjoint_degree(const Vector& d);

/// Squared row distances ||X_i - X_j||^2 over pairs (i,j), i<j, in vech order.
Vector pairwise_sq_dists(const Matrix& X);

/// tr(X^T L X) computed through the vech form:
/// sum over pairs of (-ell_ij) * ||X_i - X_j||^2.
double smoothness_vech(const Matrix& X, const LaplacianVech& v);

/// Symmetric eigensolve, eigenvalues ascending. Roundoff-negative
/// eigenvalues in (-1e-10, 0) are clamped to zero.
SpectralDecomposition eigendecompose(const Laplacian& L);

/// Graph Fourier transform: xhat = U^T x.
Vector gft(const SpectralDecomposition& decomp, const Vector& x);

/// Weighted incidence matrix M (|E| x n, edges in vech order) with
/// +sqrt(w) at the lower endpoint and -sqrt(w) at the upper; M^T M = L.
Matrix build_incidence(const Graph& g);

/// True when every node is reachable from node 0 through nonzero
/// off-diagonal entries. Zero-node and one-node graphs count as connected.
bool is_connected(const Laplacian& L, double edge_tol = 0.0);

/// Checks the Laplacian feasibility bundle: symmetry, row sums within
/// row_sum_tol*n of zero, nonpositive off-diagonals, nonnegative diagonal.
bool laplacian_feasible(const Laplacian& L, double row_sum_tol = 1e-10);

/// Adjacency recovered from a vech vector: W_ij = -ell_ij (clamped at 0).
Matrix adjacency_from_vech(const LaplacianVech& v);

}  // namespace twofold

#endif  // TWOFOLD_GRAPH_HPP
