#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "support/test_util.hpp"
#include "twofold/trainer.hpp"

using namespace twofold;
using namespace twofold::train;
using testing::random_matrix;

namespace {

datagen::DatasetPair micro_pair(std::uint64_t seed, int n = 6, double sigma = 0.3) {
    datagen::SynthConfig cfg;
    cfg.n_s = n;
    cfg.n_m = n;
    cfg.k = 2;
    cfg.clusters = 2;
    cfg.sigma = sigma;
    cfg.seed = seed;
    return datagen::gen_multimodal(cfg);
}

TrainConfig micro_config() {
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.jobs = 2;
    cfg.pds.i_max = 200;
    return cfg;
}

}  // namespace

TEST_CASE("PositiveParam") {
    CHECK(PositiveParam{0.0}.value() == 1.0);
    CHECK(PositiveParam::from_value(0.5).value() == doctest::Approx(0.5));
    CHECK(PositiveParam{-40.0}.value() > 0.0);
    CHECK_THROWS_AS(PositiveParam::from_value(0.0), config_error);
    CHECK_THROWS_AS(PositiveParam::from_value(-2.0), config_error);
}

TEST_CASE("loss") {
    std::mt19937_64 rng(1);
    const Matrix A = random_matrix(4, 5, rng);
    CHECK(loss(A, A) == 0.0);

    const Matrix B = A.array() + 0.3;
    CHECK(loss(B, A) == doctest::Approx(0.09).epsilon(1e-12));

    const Matrix C = random_matrix(4, 5, rng);
    const double r = unrolled::rmse(A, C);
    CHECK(loss(A, C) == doctest::Approx(r * r).epsilon(1e-12));

    CHECK_THROWS_AS(loss(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), dimension_error);
}

TEST_CASE("central_difference on a quadratic") {
    Vector a(4);
    a << 1.0, -2.0, 0.5, 3.0;
    auto f = [&](const Vector& x) { return (x - a).squaredNorm(); };

    SUBCASE("gradient matches 2(x - a)") {
        Vector x0(4);
        x0 << 0.2, 0.4, -1.0, 2.0;
        const Vector g = central_difference(f, x0, 1e-4);
        CHECK((g - 2.0 * (x0 - a)).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("stationary at the minimum") {
        const Vector g = central_difference(f, a, 1e-4);
        CHECK(g.norm() < 1e-6 * (1.0 + f(a)));
    }
}

TEST_CASE("grad_estimate agrees with uncached central differences") {
    const auto pair = micro_pair(2);
    const auto sched = unrolled::HyperSchedule::constant_init(2, 0.5);
    TrainConfig cfg = micro_config();

    const GradResult g = grad_estimate(sched, pair, cfg);
    CHECK(g.flagged == 0);

    auto full_loss = [&](const Vector& raw) {
        const auto s = unrolled::HyperSchedule::from_raw(raw);
        return loss(unrolled::forward(pair.Y, s, cfg.pds, {false, false}).denoised, pair.Xstar);
    };
    const Vector oracle = central_difference(full_loss, sched.to_raw(), cfg.fd_step);
    CHECK((g.grad - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient sign matches a manual probe") {
    const auto pair = micro_pair(3);
    const auto sched = unrolled::HyperSchedule::constant_init(1, 0.5);
    TrainConfig cfg = micro_config();
    const GradResult g = grad_estimate(sched, pair, cfg);

    const Vector raw0 = sched.to_raw();
    for (Eigen::Index j = 0; j < raw0.size(); ++j) {
        const double delta = cfg.fd_step * std::max(1.0, std::abs(raw0[j]));
        Vector rp = raw0, rm = raw0;
        rp[j] += delta;
        rm[j] -= delta;
        auto eval = [&](const Vector& raw) {
            const auto s = unrolled::HyperSchedule::from_raw(raw);
            return loss(unrolled::forward(pair.Y, s, cfg.pds, {false, false}).denoised,
                        pair.Xstar);
        };
        const double lp = eval(rp);
        const double lm = eval(rm);
        if (lp > lm) {
            CHECK(g.grad[j] > 0.0);
        } else if (lp < lm) {
            CHECK(g.grad[j] < 0.0);
        }
    }
}

TEST_CASE("step-halving consistency of the difference quotients") {
    const auto pair = micro_pair(4);
    const auto sched = unrolled::HyperSchedule::constant_init(1, 0.5);
    TrainConfig coarse = micro_config();
    coarse.fd_step = 2e-3;
    TrainConfig fine = coarse;
    fine.fd_step = 1e-3;

    const Vector g_coarse = grad_estimate(sched, pair, coarse).grad;
    const Vector g_fine = grad_estimate(sched, pair, fine).grad;
    const double scale = std::max(1.0, g_coarse.cwiseAbs().maxCoeff());
    CHECK((g_coarse - g_fine).cwiseAbs().maxCoeff() < 0.5 * scale);
}

TEST_CASE("train descends on a clean micro dataset") {
    std::vector<datagen::DatasetPair> pairs{micro_pair(5, 6, 0.0), micro_pair(6, 6, 0.0)};
    for (auto& p : pairs) {
        p.Y = p.Xstar;  // no noise: Y == X*
    }
    TrainConfig cfg = micro_config();
    cfg.epochs = 3;
    const auto init = unrolled::HyperSchedule::constant_init(1, 0.5);
    const auto [sched, history] = train::train(pairs, pairs, cfg, init);
    REQUIRE(history.val_loss.size() == 3);
    CHECK(history.val_loss.back() <= history.initial_val_loss + 1e-15);
    CHECK(sched.valid());
}

TEST_CASE("train is reproducible and keeps parameters positive") {
    std::vector<datagen::DatasetPair> train_pairs{micro_pair(7), micro_pair(8)};
    std::vector<datagen::DatasetPair> val_pairs{micro_pair(9)};
    TrainConfig cfg = micro_config();
    cfg.epochs = 2;
    cfg.seed = 42;
    const auto init = unrolled::HyperSchedule::constant_init(1, 0.5);

    const auto [a, ha] = train::train(train_pairs, val_pairs, cfg, init);
    const auto [b, hb] = train::train(train_pairs, val_pairs, cfg, init);
    CHECK((a.to_raw() - b.to_raw()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ha.best_epoch == hb.best_epoch);

    for (const auto& layer : a.layers) {
        CHECK(layer.modality.alpha > 0.0);
        CHECK(layer.modality.beta > 0.0);
        CHECK(layer.modality.gamma > 0.0);
        CHECK(layer.spatial.alpha > 0.0);
        CHECK(layer.spatial.beta > 0.0);
        CHECK(layer.spatial.gamma > 0.0);
    }
}

TEST_CASE("returned schedule has the best recorded validation loss") {
    std::vector<datagen::DatasetPair> train_pairs{micro_pair(10), micro_pair(11)};
    std::vector<datagen::DatasetPair> val_pairs{micro_pair(12)};
    TrainConfig cfg = micro_config();
    cfg.epochs = 3;
    const auto init = unrolled::HyperSchedule::constant_init(1, 0.5);

    const auto [sched, history] = train::train(train_pairs, val_pairs, cfg, init);
    const auto eval_opts = unrolled::ForwardOptions{false, false};
    double returned = 0.0;
    for (const auto& p : val_pairs) {
        returned += loss(unrolled::forward(p.Y, sched, cfg.pds, eval_opts).denoised, p.Xstar);
    }
    returned /= static_cast<double>(val_pairs.size());

    CHECK(returned <= history.initial_val_loss + 1e-12);
    for (double v : history.val_loss) {
        CHECK(returned <= v + 1e-12);
    }
}

TEST_CASE("zero epochs returns the initialization untouched") {
    std::vector<datagen::DatasetPair> pairs{micro_pair(13)};
    TrainConfig cfg = micro_config();
    cfg.epochs = 0;
    const auto init = unrolled::HyperSchedule::constant_init(2, 0.5);
    const auto [sched, history] = train::train(pairs, pairs, cfg, init);
    CHECK((sched.to_raw() - init.to_raw()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(history.train_loss.empty());
    CHECK(history.val_loss.empty());
}

TEST_CASE("train validates inputs") {
    TrainConfig cfg = micro_config();
    const auto init = unrolled::HyperSchedule::constant_init(1, 0.5);
    CHECK_THROWS_AS(train::train({}, {}, cfg, init), data_error);

    std::vector<datagen::DatasetPair> pairs{micro_pair(14)};
    TrainConfig bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(train::train(pairs, pairs, bad, init), config_error);
    bad = cfg;
    bad.fd_step = 1.0;
    CHECK_THROWS_AS(train::train(pairs, pairs, bad, init), config_error);
}

TEST_CASE("checkpoint round trip") {
    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "twofold_ck_test.json";

    auto sched = unrolled::HyperSchedule::constant_init(3, 0.5);
    sched.layers[1].modality.alpha = 1.75;
    sched.layers[2].spatial.gamma = 0.03;
    save_checkpoint(path, sched, R"({"n_s": 12, "n_m": 10})");

    const auto loaded = load_checkpoint(path);
    CHECK(loaded.depth() == 3);
    CHECK((loaded.to_raw() - sched.to_raw()).cwiseAbs().maxCoeff() < 1e-12);

    SUBCASE("malformed JSON is a parse error") {
        std::FILE* f = std::fopen(path.string().c_str(), "w");
        std::fputs("{not json", f);
        std::fclose(f);
        CHECK_THROWS_AS(load_checkpoint(path), parse_error);
    }
    SUBCASE("parameter count must match T") {
        std::FILE* f = std::fopen(path.string().c_str(), "w");
        std::fputs(R"({"format_version":1,"T":2,"raw_params":[0,0,0]})", f);
        std::fclose(f);
        CHECK_THROWS_AS(load_checkpoint(path), parse_error);
    }
    fs::remove(path);
}
