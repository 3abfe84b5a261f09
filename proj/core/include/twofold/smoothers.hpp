#ifndef TWOFOLD_SMOOTHERS_HPP
#define TWOFOLD_SMOOTHERS_HPP

#include "twofold/graph.hpp"

namespace twofold::smoothers {

/// Spectral low-pass kernel: gain h(lambda) applied per graph frequency.
///   tikhonov: 1 / (1 + param * lambda)
///   glpf:     1 / (1 + param * lambda)   (baseline naming, param = tau_2)
///   heat:     exp(-param * lambda)       (param = tau_1)
struct FilterKernel {
    enum class Kind { tikhonov, glpf, heat };
    Kind kind = Kind::tikhonov;
    double param = 1.0;

    double gain(double lambda) const;
};

/// Closed-form Tikhonov smoothing: solves (I + alpha*L) X = Y columnwise
/// through a symmetric positive-definite factorization.
Matrix tikhonov_solve(const Laplacian& L, const Matrix& Y, double alpha);

/// Applies U diag(h(lambda)) U^T to every column of Y.
Matrix spectral_filter(const SpectralDecomposition& decomp, const Matrix& Y,
                       const FilterKernel& kernel);

/// SVD hard shrinkage: zeroes singular values below threshold and
/// reconstructs.
Matrix svds_denoise(const Matrix& Y, double threshold);

}  // namespace twofold::smoothers

#endif  // TWOFOLD_SMOOTHERS_HPP
