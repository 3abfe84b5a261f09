#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SVD>

#include <random>

#include "support/test_util.hpp"
#include "twofold/smoothers.hpp"

using namespace twofold;
using namespace twofold::smoothers;
using testing::path_graph;
using testing::random_graph;
using testing::random_matrix;

TEST_CASE("tikhonov_solve") {
    SUBCASE("vanishing alpha is the identity filter") {
        std::mt19937_64 rng(1);
        const Laplacian L = build_laplacian(random_graph(6, 0.5, rng));
        const Matrix Y = random_matrix(6, 3, rng);
        CHECK((tikhonov_solve(L, Y, 1e-12) - Y).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("2-node hand solve: (I+L)x = [1,0] gives [2/3, 1/3]") {
        const Laplacian L = build_laplacian(path_graph(2));
        Matrix y(2, 1);
        y << 1, 0;
        const Matrix x = tikhonov_solve(L, y, 1.0);
        CHECK(x(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(x(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("constant columns pass unchanged") {
        std::mt19937_64 rng(2);
        const Laplacian L = build_laplacian(random_graph(7, 0.5, rng));
        Matrix Y = Matrix::Constant(7, 2, 3.25);
        CHECK((tikhonov_solve(L, Y, 5.0) - Y).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("solution satisfies the normal equations") {
        std::mt19937_64 rng(3);
        const Laplacian L = build_laplacian(random_graph(8, 0.4, rng));
        const Matrix Y = random_matrix(8, 4, rng);
        const double alpha = 2.7;
        const Matrix X = tikhonov_solve(L, Y, alpha);
        const Matrix residual = X + alpha * (L.matrix * X) - Y;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("errors") {
        const Laplacian L = build_laplacian(path_graph(3));
        CHECK_THROWS_AS(tikhonov_solve(L, Matrix::Zero(4, 2), 1.0), dimension_error);
        CHECK_THROWS_AS(tikhonov_solve(L, Matrix::Zero(3, 2), 0.0), config_error);
    }
}

TEST_CASE("spectral_filter") {
    std::mt19937_64 rng(4);
    const Laplacian L = build_laplacian(random_graph(10, 0.4, rng));
    const auto decomp = eigendecompose(L);
    const Matrix Y = random_matrix(10, 5, rng);

    SUBCASE("heat kernel with vanishing tau is the identity") {
        const Matrix out = spectral_filter(decomp, Y, {FilterKernel::Kind::heat, 1e-12});
        CHECK((out - Y).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("tikhonov kernel agrees with the closed-form solve") {
        for (double alpha : {0.1, 1.0, 7.5}) {
            const Matrix spectral =
                spectral_filter(decomp, Y, {FilterKernel::Kind::tikhonov, alpha});
            const Matrix direct = tikhonov_solve(L, Y, alpha);
            CHECK((spectral - direct).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("glpf has unit gain at lambda 0") {
        Matrix C = Matrix::Constant(10, 3, -1.5);
        const Matrix out = spectral_filter(decomp, C, {FilterKernel::Kind::glpf, 2.0});
        CHECK((out - C).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(spectral_filter(decomp, Matrix::Zero(4, 2), FilterKernel{}),
                        dimension_error);
    }
}

TEST_CASE("all kernels are non-expansive and shrink graph energy") {
    std::mt19937_64 rng(5);
    const Laplacian L = build_laplacian(random_graph(9, 0.5, rng));
    const auto decomp = eigendecompose(L);
    const Matrix Y = random_matrix(9, 4, rng);
    const double energy_in = (Y.transpose() * L.matrix * Y).trace();

    for (auto kind :
         {FilterKernel::Kind::tikhonov, FilterKernel::Kind::glpf, FilterKernel::Kind::heat}) {
        const Matrix out = spectral_filter(decomp, Y, {kind, 1.3});
        CHECK(out.norm() <= Y.norm() + 1e-10);
        CHECK((out.transpose() * L.matrix * out).trace() <= energy_in + 1e-10);
        // connected graph: gain 1 at lambda=0 preserves column means
        for (Eigen::Index c = 0; c < Y.cols(); ++c) {
            CHECK(out.col(c).mean() == doctest::Approx(Y.col(c).mean()).epsilon(1e-8));
        }
    }
}

TEST_CASE("svds_denoise") {
    std::mt19937_64 rng(6);

    SUBCASE("threshold below the only singular value keeps a rank-1 matrix") {
        Vector u = random_matrix(6, 1, rng);
        Vector v = random_matrix(4, 1, rng);
        u.normalize();
        v.normalize();
        const Matrix Y = 5.0 * u * v.transpose();
        CHECK((svds_denoise(Y, 1.0) - Y).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("threshold above the top singular value zeroes everything") {
        const Matrix Y = random_matrix(5, 3, rng);
        const double s1 = Eigen::JacobiSVD<Matrix>(Y).singularValues()(0);
        CHECK(svds_denoise(Y, s1 * 1.01).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("threshold between sigma_2 and sigma_1 equals the rank-1 truncation") {
        const Matrix Y = random_matrix(6, 4, rng);
        Eigen::JacobiSVD<Matrix> svd(Y, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector sv = svd.singularValues();
        const double threshold = 0.5 * (sv(0) + sv(1));
        const Matrix truncated =
            sv(0) * svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
        CHECK((svds_denoise(Y, threshold) - truncated).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("applying twice equals applying once") {
        const Matrix Y = random_matrix(7, 5, rng);
        const Matrix once = svds_denoise(Y, 1.0);
        const Matrix twice = svds_denoise(once, 1.0);
        CHECK((once - twice).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("threshold must be positive") {
        CHECK_THROWS_AS(svds_denoise(Matrix::Zero(2, 2), 0.0), config_error);
    }
}
