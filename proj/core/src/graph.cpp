#include "twofold/graph.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <vector>

namespace twofold {

void validate_graph(const Graph& g) {
    if (g.weights.rows() != g.n || g.weights.cols() != g.n) {
        throw invalid_graph_error("graph weight matrix is " + std::to_string(g.weights.rows()) +
                                  "x" + std::to_string(g.weights.cols()) + ", expected " +
                                  std::to_string(g.n) + "x" + std::to_string(g.n));
    }
    for (int i = 0; i < g.n; ++i) {
        if (g.weights(i, i) != 0.0) {
            throw invalid_graph_error("nonzero diagonal at node " + std::to_string(i));
        }
        for (int j = i + 1; j < g.n; ++j) {
            const double wij = g.weights(i, j);
            if (wij != g.weights(j, i)) {
                throw invalid_graph_error("asymmetric weights at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
            }
            if (wij < 0.0 || !std::isfinite(wij)) {
                throw invalid_graph_error("invalid weight " + std::to_string(wij) + " at (" +
                                          std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

Graph Graph::from_weights(Matrix w) {
    Graph g;
    g.n = static_cast<int>(w.rows());
    g.weights = std::move(w);
    validate_graph(g);
    return g;
}

Laplacian build_laplacian(const Graph& g) {
    validate_graph(g);
    Laplacian L;
    L.n = g.n;
    L.matrix = -g.weights;
    for (int i = 0; i < g.n; ++i) {
        L.matrix(i, i) = g.weights.row(i).sum();
    }
    return L;
}

Laplacian vech_expand(const LaplacianVech& v) {
    if (v.ell.size() != pair_count(v.n)) {
        throw dimension_error("vech length " + std::to_string(v.ell.size()) + " does not match " +
                              std::to_string(v.n) + " nodes");
    }
    Laplacian L;
    L.n = v.n;
    L.matrix = Matrix::Zero(v.n, v.n);
    Eigen::Index idx = 0;
    for (int i = 0; i < v.n; ++i) {
        for (int j = i + 1; j < v.n; ++j, ++idx) {
            const double e = v.ell[idx];
            L.matrix(i, j) = e;
            L.matrix(j, i) = e;
            L.matrix(i, i) -= e;
            L.matrix(j, j) -= e;
        }
    }
    return L;
}

LaplacianVech vech_from_laplacian(const Laplacian& L) {
    LaplacianVech v;
    v.n = L.n;
    v.ell.resize(pair_count(L.n));
    Eigen::Index idx = 0;
    for (int i = 0; i < L.n; ++i) {
        for (int j = i + 1; j < L.n; ++j, ++idx) {
            v.ell[idx] = L.matrix(i, j);
        }
    }
    return v;
}

Vector vech_degree(const LaplacianVech& v) {
    if (v.ell.size() != pair_count(v.n)) {
        throw dimension_error("vech length does not match node count " + std::to_string(v.n));
    }
    Vector d = Vector::Zero(v.n);
    Eigen::Index idx = 0;
    for (int i = 0; i < v.n; ++i) {
        for (int j = i + 1; j < v.n; ++j, ++idx) {
            d[i] -= v.ell[idx];
            d[j] -= v.ell[idx];
        }
    }
    return d;
}

Vector vech_adjoint_degree(const Vector& d) {
    const int n = static_cast<int>(d.size());
    Vector out(pair_count(n));
    Eigen::Index idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++idx) {
            out[idx] = -(d[i] + d[j]);
        }
    }
    return out;
}

Vector pairwise_sq_dists(const Matrix& X) {
    const int n = static_cast<int>(X.rows());
    const Matrix gram = X * X.transpose();
    Vector out(pair_count(n));
    Eigen::Index idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++idx) {
            out[idx] = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
        }
    }
    return out;
}

double smoothness_vech(const Matrix& X, const LaplacianVech& v) {
    if (static_cast<int>(X.rows()) != v.n) {
        throw dimension_error("signal has " + std::to_string(X.rows()) + " rows, graph has " +
                              std::to_string(v.n) + " nodes");
    }
    if (v.ell.size() != pair_count(v.n)) {
        throw dimension_error("vech length does not match node count " + std::to_string(v.n));
    }
    return -v.ell.dot(pairwise_sq_dists(X));
}

SpectralDecomposition eigendecompose(const Laplacian& L) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(L.matrix);
    if (solver.info() != Eigen::Success) {
        throw numeric_error("eigensolver did not converge within " +
                            std::to_string(Eigen::SelfAdjointEigenSolver<Matrix>::m_maxIterations) +
                            " implicit QL sweeps per eigenvalue on a " + std::to_string(L.n) +
                            "-node Laplacian");
    }
    SpectralDecomposition d;
    d.eigenvalues = solver.eigenvalues();
    d.eigenvectors = solver.eigenvectors();
    for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
        if (d.eigenvalues[i] > -1e-10 && d.eigenvalues[i] < 0.0) {
            d.eigenvalues[i] = 0.0;
        }
    }
    return d;
}

Vector gft(const SpectralDecomposition& decomp, const Vector& x) {
    if (x.size() != decomp.eigenvectors.rows()) {
        throw dimension_error("signal length " + std::to_string(x.size()) +
                              " does not match decomposition size " +
                              std::to_string(decomp.eigenvectors.rows()));
    }
    return decomp.eigenvectors.transpose() * x;
}

Matrix build_incidence(const Graph& g) {
    validate_graph(g);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < g.n; ++i) {
        for (int j = i + 1; j < g.n; ++j) {
            if (g.weights(i, j) > 0.0) {
                edges.emplace_back(i, j);
            }
        }
    }
    Matrix M = Matrix::Zero(static_cast<Eigen::Index>(edges.size()), g.n);
    for (std::size_t q = 0; q < edges.size(); ++q) {
        const auto [i, j] = edges[q];
        const double r = std::sqrt(g.weights(i, j));
        M(static_cast<Eigen::Index>(q), i) = r;
        M(static_cast<Eigen::Index>(q), j) = -r;
    }
    return M;
}

bool is_connected(const Laplacian& L, double edge_tol) {
    if (L.n <= 1) {
        return true;
    }
    std::vector<char> seen(static_cast<std::size_t>(L.n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        for (int j = 0; j < L.n; ++j) {
            if (j != i && !seen[j] && std::abs(L.matrix(i, j)) > edge_tol) {
                seen[j] = 1;
                ++count;
                stack.push_back(j);
            }
        }
    }
    return count == L.n;
}

bool laplacian_feasible(const Laplacian& L, double row_sum_tol) {
    if (L.matrix.rows() != L.n || L.matrix.cols() != L.n) {
        return false;
    }
    const double row_bound = row_sum_tol * L.n;
    for (int i = 0; i < L.n; ++i) {
        if (L.matrix(i, i) < 0.0) {
            return false;
        }
        if (std::abs(L.matrix.row(i).sum()) > row_bound) {
            return false;
        }
        for (int j = i + 1; j < L.n; ++j) {
            if (L.matrix(i, j) != L.matrix(j, i) || L.matrix(i, j) > 0.0) {
                return false;
            }
        }
    }
    return true;
}

Matrix adjacency_from_vech(const LaplacianVech& v) {
    Matrix W = Matrix::Zero(v.n, v.n);
    Eigen::Index idx = 0;
    for (int i = 0; i < v.n; ++i) {
        for (int j = i + 1; j < v.n; ++j, ++idx) {
            const double w = std::max(0.0, -v.ell[idx]);
            W(i, j) = w;
            W(j, i) = w;
        }
    }
    return W;
}

}  // namespace twofold
