#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "support/test_util.hpp"
#include "twofold/csv.hpp"
#include "twofold/datagen.hpp"

using namespace twofold;
using namespace twofold::datagen;

TEST_CASE("gen_sensor_graph") {
    SUBCASE("n=3, k=2 is a complete triangle") {
        const Graph g = gen_sensor_graph(3, 2, 123);
        CHECK(g.weights(0, 1) > 0.0);
        CHECK(g.weights(0, 2) > 0.0);
        CHECK(g.weights(1, 2) > 0.0);
    }
    SUBCASE("weights live in [0,1] and the graph is valid") {
        const Graph g = gen_sensor_graph(40, 6, 7);
        validate_graph(g);
        CHECK(g.weights.maxCoeff() <= 1.0);
        CHECK(g.weights.minCoeff() >= 0.0);
    }
    SUBCASE("every node keeps at least k neighbors") {
        const Graph g = gen_sensor_graph(30, 4, 99);
        for (int i = 0; i < g.n; ++i) {
            int degree = 0;
            for (int j = 0; j < g.n; ++j) {
                if (g.weights(i, j) > 0.0) ++degree;
            }
            CHECK(degree >= 4);
        }
    }
    SUBCASE("seed determinism") {
        const Graph a = gen_sensor_graph(20, 3, 5);
        const Graph b = gen_sensor_graph(20, 3, 5);
        CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("n <= k is rejected") {
        CHECK_THROWS_AS(gen_sensor_graph(4, 4, 0), config_error);
    }
}

TEST_CASE("gen_community_graph") {
    SUBCASE("P=1 is complete with unit weights") {
        const auto cg = gen_community_graph(6, 1, 11);
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 6; ++j) {
                CHECK(cg.graph.weights(i, j) == (i == j ? 0.0 : 1.0));
            }
        }
    }
    SUBCASE("P=n with zero inter-cluster probability is empty") {
        const auto cg = gen_community_graph(7, 7, 13, 0.0);
        CHECK(cg.graph.weights.isZero(0.0));
    }
    SUBCASE("cluster sizes are near-equal, remainder to the first clusters") {
        const auto cg = gen_community_graph(11, 3, 17);
        std::vector<int> sizes(3, 0);
        for (int label : cg.labels) ++sizes[static_cast<std::size_t>(label)];
        CHECK(sizes[0] == 4);
        CHECK(sizes[1] == 4);
        CHECK(sizes[2] == 3);
    }
    SUBCASE("inter-cluster edge count matches the binomial mean over 50 seeds") {
        const int n = 120;
        const int P = 8;
        long total = 0;
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            const auto cg = gen_community_graph(n, P, seed);
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j) {
                    if (cg.labels[i] != cg.labels[j] && cg.graph.weights(i, j) > 0.0) {
                        ++total;
                    }
                }
            }
        }
        const double cross_pairs = 6300.0;  // C(120,2) - 8*C(15,2)
        const double p = 1.0 / n;
        const double mean = cross_pairs * p;
        const double sd_of_mean = std::sqrt(cross_pairs * p * (1.0 - p) / 50.0);
        const double empirical = static_cast<double>(total) / 50.0;
        CHECK(std::abs(empirical - mean) <= 3.0 * sd_of_mean);
    }
    SUBCASE("P > n is rejected") {
        CHECK_THROWS_AS(gen_community_graph(3, 4, 0), config_error);
    }
}

TEST_CASE("sample_gmrf") {
    const Graph g = testing::path_graph(5);
    const Laplacian L = build_laplacian(g);

    SUBCASE("no component along the constant nullvector") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Vector x = sample_gmrf(L, seed);
            CHECK(std::abs(x.sum()) < 1e-8);
        }
    }
    SUBCASE("seed determinism") {
        CHECK((sample_gmrf(L, 77) - sample_gmrf(L, 77)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("empirical covariance approaches the pseudoinverse") {
        const auto decomp = eigendecompose(L);
        Matrix pinv = Matrix::Zero(5, 5);
        for (int i = 0; i < 5; ++i) {
            if (decomp.eigenvalues[i] > 1e-8) {
                pinv += decomp.eigenvectors.col(i) * decomp.eigenvectors.col(i).transpose() /
                        decomp.eigenvalues[i];
            }
        }
        std::mt19937_64 rng(123);
        Matrix cov = Matrix::Zero(5, 5);
        const int samples = 20000;
        for (int s = 0; s < samples; ++s) {
            const Vector x = sample_gmrf(decomp, rng);
            cov += x * x.transpose();
        }
        cov /= static_cast<double>(samples);
        CHECK((cov - pinv).cwiseAbs().maxCoeff() <= 0.05);
    }
}

TEST_CASE("gen_multimodal") {
    SynthConfig cfg;
    cfg.n_s = 12;
    cfg.n_m = 10;
    cfg.k = 3;
    cfg.clusters = 3;
    cfg.sigma = 0.0;
    cfg.seed = 21;

    SUBCASE("columns in the same cluster are identical; cluster count is P") {
        const DatasetPair pair = gen_multimodal(cfg);
        std::set<std::string> distinct;
        for (Eigen::Index j = 0; j < pair.Xstar.cols(); ++j) {
            std::string key;
            for (Eigen::Index i = 0; i < pair.Xstar.rows(); ++i) {
                key.append(reinterpret_cast<const char*>(&pair.Xstar(i, j)), sizeof(double));
            }
            distinct.insert(key);
        }
        CHECK(distinct.size() == 3);
    }
    SUBCASE("sigma=0 leaves the observation clean") {
        const DatasetPair pair = gen_multimodal(cfg);
        CHECK((pair.Y - pair.Xstar).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("noise variance matches sigma^2 within 5% across seeds") {
        cfg.sigma = 0.3;
        double acc = 0.0;
        const int trials = 20;
        for (int s = 0; s < trials; ++s) {
            cfg.seed = 1000 + static_cast<std::uint64_t>(s);
            const DatasetPair pair = gen_multimodal(cfg);
            acc += (pair.Y - pair.Xstar).squaredNorm() /
                   static_cast<double>(pair.Y.size());
        }
        acc /= trials;
        CHECK(acc == doctest::Approx(0.09).epsilon(0.05));
    }
    SUBCASE("generated graphs satisfy the Graph invariants") {
        const DatasetPair pair = gen_multimodal(cfg);
        REQUIRE(pair.gt_spatial.has_value());
        REQUIRE(pair.gt_modality.has_value());
        validate_graph(*pair.gt_spatial);
        validate_graph(*pair.gt_modality);
    }
    SUBCASE("invalid configs are rejected") {
        SynthConfig bad = cfg;
        bad.n_s = bad.k;
        CHECK_THROWS_AS(gen_multimodal(bad), config_error);
        bad = cfg;
        bad.sigma = -1.0;
        CHECK_THROWS_AS(gen_multimodal(bad), config_error);
        bad = cfg;
        bad.clusters = bad.n_m + 1;
        CHECK_THROWS_AS(gen_multimodal(bad), config_error);
    }
}

TEST_CASE("rbf_graph") {
    SUBCASE("duplicate rows get weight 1") {
        Matrix X(3, 2);
        X << 1, 2, 1, 2, 5, 5;
        const Graph g = rbf_graph(X, 1.0, 2);
        CHECK(g.weights(0, 1) == doctest::Approx(1.0));
    }
    SUBCASE("weights decrease with distance") {
        Matrix X(4, 1);
        X << 0.0, 1.0, 2.5, 6.0;
        const Graph g = rbf_graph(X, 2.0, 3);
        CHECK(g.weights(0, 1) > g.weights(0, 2));
        CHECK(g.weights(0, 2) > g.weights(0, 3));
    }
    SUBCASE("tiny bandwidth kills non-duplicate edges") {
        Matrix X(3, 1);
        X << 0.0, 1.0, 3.0;
        const Graph g = rbf_graph(X, 1e-4, 2);
        CHECK(g.weights(0, 1) < 1e-12);
        CHECK(g.weights(1, 2) < 1e-12);
    }
    SUBCASE("nonpositive bandwidth selects the median distance") {
        std::mt19937_64 rng(31);
        const Matrix X = testing::random_matrix(10, 3, rng);
        const Graph g = rbf_graph(X, 0.0, 4);
        validate_graph(g);
        CHECK(g.weights.maxCoeff() > 0.0);
    }
}

TEST_CASE("matrix CSV round trip") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "twofold_csv_test.csv";
    std::mt19937_64 rng(33);

    SUBCASE("save then load is lossless") {
        const Matrix X = testing::random_matrix(7, 5, rng, 3.0);
        csv::save_matrix(path, X);
        const Matrix Y = csv::load_matrix(path);
        REQUIRE(Y.rows() == X.rows());
        REQUIRE(Y.cols() == X.cols());
        CHECK((X - Y).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("1x1 matrix") {
        Matrix X(1, 1);
        X << -0.125;
        csv::save_matrix(path, X);
        CHECK(csv::load_matrix(path)(0, 0) == -0.125);
    }
    SUBCASE("ragged rows name the line") {
        std::ofstream out(path);
        out << "1,2,3\n4,5\n";
        out.close();
        bool threw = false;
        try {
            csv::load_matrix(path);
        } catch (const parse_error& e) {
            threw = true;
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        CHECK(threw);
    }
    SUBCASE("non-numeric cells name row and column") {
        std::ofstream out(path);
        out << "1,2\n3,oops\n";
        out.close();
        bool threw = false;
        try {
            csv::load_matrix(path);
        } catch (const parse_error& e) {
            threw = true;
            const std::string what = e.what();
            CHECK(what.find("row 2") != std::string::npos);
            CHECK(what.find("column 2") != std::string::npos);
        }
        CHECK(threw);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(csv::load_matrix("/nonexistent/nope.csv"), data_error);
    }
    fs::remove(path);
}
