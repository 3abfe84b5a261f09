#include "twofold/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace twofold::train {

double PositiveParam::value() const {
    return std::exp(raw);
}

PositiveParam PositiveParam::from_value(double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw config_error("positive parameter must be finite and > 0, got " + std::to_string(v));
    }
    return PositiveParam{std::log(v)};
}

void TrainConfig::validate() const {
    if (epochs < 0) throw config_error("epochs must be >= 0");
    if (!(learning_rate > 0.0)) throw config_error("learning rate must be > 0");
    if (batch < 1) throw config_error("batch must be >= 1");
    if (!(fd_step > 1e-8 && fd_step < 1e-1)) {
        throw config_error("fd_step must lie in (1e-8, 1e-1), got " + std::to_string(fd_step));
    }
    if (jobs < 1) throw config_error("jobs must be >= 1");
    if (!pds.valid()) throw config_error("invalid PDS settings in train config");
}

double loss(const Matrix& X, const Matrix& Xstar) {
    if (X.rows() != Xstar.rows() || X.cols() != Xstar.cols()) {
        throw dimension_error("loss shape mismatch: " + std::to_string(X.rows()) + "x" +
                              std::to_string(X.cols()) + " vs " + std::to_string(Xstar.rows()) +
                              "x" + std::to_string(Xstar.cols()));
    }
    return (X - Xstar).squaredNorm() / static_cast<double>(X.size());
}

Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x0,
                          double rel_step) {
    Vector g(x0.size());
    for (Eigen::Index j = 0; j < x0.size(); ++j) {
        const double delta = rel_step * std::max(1.0, std::abs(x0[j]));
        Vector xp = x0;
        Vector xm = x0;
        xp[j] += delta;
        xm[j] -= delta;
        g[j] = (f(xp) - f(xm)) / (2.0 * delta);
    }
    return g;
}

GradResult grad_estimate(const unrolled::HyperSchedule& sched, const datagen::DatasetPair& pair,
                         const TrainConfig& cfg) {
    cfg.validate();
    const int T = sched.depth();
    const Eigen::Index dim = 6 * static_cast<Eigen::Index>(T);
    const Vector raw0 = sched.to_raw();

    // Base pass at the unperturbed schedule; its trace caches every
    // layer's spatial output for probe restarts.
    const unrolled::ForwardResult base =
        unrolled::forward(pair.Y, sched, cfg.pds, {/*keep_trace=*/true, /*warm_start=*/false});
    const double loss0 = loss(base.denoised, pair.Xstar);

    GradResult result;
    result.grad = Vector::Zero(dim);
    result.loss_value = loss0;

    const unrolled::ForwardOptions probe_opts{/*keep_trace=*/false, /*warm_start=*/false};
    auto probe_loss = [&](const Vector& raw, int layer) {
        const auto sched_p = unrolled::HyperSchedule::from_raw(raw);
        const auto r = unrolled::forward_from(pair.Y, sched_p, cfg.pds, base.trace, layer,
                                              probe_opts);
        return loss(r.denoised, pair.Xstar);
    };

    std::atomic<Eigen::Index> next{0};
    std::atomic<int> flagged{0};
    std::exception_ptr worker_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        try {
            for (Eigen::Index j = next.fetch_add(1); j < dim; j = next.fetch_add(1)) {
                const int layer = static_cast<int>(j / 6);
                const double delta = cfg.fd_step * std::max(1.0, std::abs(raw0[j]));
                Vector raw_p = raw0;
                Vector raw_m = raw0;
                raw_p[j] += delta;
                raw_m[j] -= delta;
                double lp, lm;
                try {
                    lp = probe_loss(raw_p, layer);
                    lm = probe_loss(raw_m, layer);
                } catch (const numeric_error&) {
                    lp = lm = std::numeric_limits<double>::quiet_NaN();
                }
                if (std::isfinite(lp) && std::isfinite(lm)) {
                    result.grad[j] = (lp - lm) / (2.0 * delta);
                } else {
                    result.grad[j] = 0.0;
                    flagged.fetch_add(1);
                }
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) {
                worker_error = std::current_exception();
            }
        }
    };

    const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(dim));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (worker_error) {
        std::rethrow_exception(worker_error);
    }

    result.flagged = flagged.load();
    if (result.flagged > 0) {
        std::cerr << "warning: " << result.flagged
                  << " gradient coordinate(s) hit non-finite probe losses and were zeroed\n";
    }
    return result;
}

std::pair<unrolled::HyperSchedule, TrainHistory> train(
    const std::vector<datagen::DatasetPair>& train_pairs,
    const std::vector<datagen::DatasetPair>& val_pairs, const TrainConfig& cfg,
    const unrolled::HyperSchedule& init) {
    cfg.validate();
    if (train_pairs.empty()) {
        throw data_error("training set is empty");
    }
    if (!init.valid()) {
        throw config_error("initial schedule has a nonpositive parameter");
    }

    const Eigen::Index dim = 6 * static_cast<Eigen::Index>(init.depth());
    Vector raw = init.to_raw();

    // Without validation pairs, selection falls back to the training set.
    const auto& selection_pairs = val_pairs.empty() ? train_pairs : val_pairs;
    const unrolled::ForwardOptions eval_opts{/*keep_trace=*/false, /*warm_start=*/false};
    auto mean_val_loss = [&](const Vector& r) {
        const auto sched = unrolled::HyperSchedule::from_raw(r);
        double acc = 0.0;
        for (const auto& pair : selection_pairs) {
            acc += loss(unrolled::forward(pair.Y, sched, cfg.pds, eval_opts).denoised, pair.Xstar);
        }
        return acc / static_cast<double>(selection_pairs.size());
    };

    TrainHistory history;
    history.initial_val_loss = mean_val_loss(raw);
    Vector best_raw = raw;
    double best_val = history.initial_val_loss;
    history.best_epoch = 0;

    // Adaptive moments on the raw parameters.
    Vector m = Vector::Zero(dim);
    Vector v = Vector::Zero(dim);
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double adam_eps = 1e-8;
    long step = 0;

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train_pairs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        bool any_usable_grad = false;

        for (std::size_t pos = 0; pos < order.size();) {
            const std::size_t batch_end =
                std::min(order.size(), pos + static_cast<std::size_t>(cfg.batch));
            Vector grad = Vector::Zero(dim);
            int in_batch = 0;
            const auto sched = unrolled::HyperSchedule::from_raw(raw);
            for (; pos < batch_end; ++pos, ++in_batch) {
                const GradResult g = grad_estimate(sched, train_pairs[order[pos]], cfg);
                grad += g.grad;
                epoch_loss += g.loss_value;
                if (g.flagged < dim) {
                    any_usable_grad = true;
                }
            }
            grad /= static_cast<double>(in_batch);

            ++step;
            m = beta1 * m + (1.0 - beta1) * grad;
            v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
            const double mc = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double vc = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (Eigen::Index j = 0; j < dim; ++j) {
                raw[j] -= cfg.learning_rate * (m[j] / mc) / (std::sqrt(v[j] / vc) + adam_eps);
            }
            for (Eigen::Index j = 0; j < dim; ++j) {
                if (!std::isfinite(raw[j]) || !(PositiveParam{raw[j]}.value() > 0.0)) {
                    throw numeric_error("raw parameter " + std::to_string(j) +
                                        " became non-finite during training");
                }
            }
        }

        if (!any_usable_grad) {
            throw numeric_error("every gradient coordinate was non-finite for all of epoch " +
                                std::to_string(epoch) + "; training aborted");
        }

        history.train_loss.push_back(epoch_loss / static_cast<double>(train_pairs.size()));
        const double val = mean_val_loss(raw);
        history.val_loss.push_back(val);
        if (val < best_val) {
            best_val = val;
            best_raw = raw;
            history.best_epoch = epoch;
        }
    }

    return {unrolled::HyperSchedule::from_raw(best_raw), history};
}

void save_checkpoint(const std::filesystem::path& path, const unrolled::HyperSchedule& sched,
                     const std::string& extra_json) {
    nlohmann::json doc;
    doc["format_version"] = 1;
    doc["T"] = sched.depth();
    const Vector raw = sched.to_raw();
    doc["raw_params"] = std::vector<double>(raw.data(), raw.data() + raw.size());
    if (!extra_json.empty()) {
        const auto extra = nlohmann::json::parse(extra_json);
        for (const auto& [key, value] : extra.items()) {
            doc[key] = value;
        }
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw data_error("cannot write " + tmp.string());
        }
        out << doc.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

unrolled::HyperSchedule load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open checkpoint " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("malformed checkpoint " + path.string() + ": " + e.what());
    }
    if (!doc.contains("format_version") || doc["format_version"].get<int>() != 1) {
        throw parse_error("unsupported checkpoint format in " + path.string());
    }
    const int T = doc.at("T").get<int>();
    const auto params = doc.at("raw_params").get<std::vector<double>>();
    if (static_cast<int>(params.size()) != 6 * T) {
        throw parse_error("checkpoint " + path.string() + " has " +
                          std::to_string(params.size()) + " parameters, expected " +
                          std::to_string(6 * T));
    }
    Vector raw(params.size());
    std::copy(params.begin(), params.end(), raw.data());
    return unrolled::HyperSchedule::from_raw(raw);
}

}  // namespace twofold::train
