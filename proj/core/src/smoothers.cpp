#include "twofold/smoothers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace twofold::smoothers {

double FilterKernel::gain(double lambda) const {
    switch (kind) {
        case Kind::tikhonov:
        case Kind::glpf:
            return 1.0 / (1.0 + param * lambda);
        case Kind::heat:
            return std::exp(-param * lambda);
    }
    return 1.0;
}

Matrix tikhonov_solve(const Laplacian& L, const Matrix& Y, double alpha) {
    if (static_cast<int>(Y.rows()) != L.n) {
        throw dimension_error("signal has " + std::to_string(Y.rows()) + " rows, Laplacian has " +
                              std::to_string(L.n) + " nodes");
    }
    if (!(alpha > 0.0)) {
        throw config_error("tikhonov alpha must be > 0, got " + std::to_string(alpha));
    }
    Matrix A = alpha * L.matrix;
    A.diagonal().array() += 1.0;
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) {
        // I + alpha*L is SPD for any PSD L; reaching this means the input
        // was not a valid Laplacian.
        throw numeric_error("Cholesky factorization of I + alpha*L failed (alpha=" +
                            std::to_string(alpha) + ")");
    }
    return llt.solve(Y);
}

Matrix spectral_filter(const SpectralDecomposition& decomp, const Matrix& Y,
                       const FilterKernel& kernel) {
    if (Y.rows() != decomp.eigenvectors.rows()) {
        throw dimension_error("signal has " + std::to_string(Y.rows()) +
                              " rows, decomposition has " +
                              std::to_string(decomp.eigenvectors.rows()));
    }
    Vector gains(decomp.eigenvalues.size());
    for (Eigen::Index i = 0; i < gains.size(); ++i) {
        gains[i] = kernel.gain(decomp.eigenvalues[i]);
    }
    return decomp.eigenvectors * (gains.asDiagonal() * (decomp.eigenvectors.transpose() * Y));
}

Matrix svds_denoise(const Matrix& Y, double threshold) {
    if (!(threshold > 0.0)) {
        throw config_error("svds threshold must be > 0, got " + std::to_string(threshold));
    }
    Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = svd.singularValues();
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] < threshold) {
            sv[i] = 0.0;
        }
    }
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace twofold::smoothers
