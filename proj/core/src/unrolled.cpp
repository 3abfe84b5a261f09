#include "twofold/unrolled.hpp"

#include <cmath>
#include <string>

#include "twofold/smoothers.hpp"

namespace twofold::unrolled {

bool HyperSchedule::valid() const {
    for (const auto& layer : layers) {
        if (!layer.modality.valid() || !layer.spatial.valid()) {
            return false;
        }
    }
    return true;
}

Vector HyperSchedule::to_raw() const {
    Vector raw(6 * depth());
    Eigen::Index k = 0;
    for (const auto& layer : layers) {
        for (const auto* p : {&layer.modality, &layer.spatial}) {
            raw[k++] = std::log(p->alpha);
            raw[k++] = std::log(p->beta);
            raw[k++] = std::log(p->gamma);
        }
    }
    return raw;
}

HyperSchedule HyperSchedule::from_raw(const Vector& raw) {
    if (raw.size() % 6 != 0) {
        throw dimension_error("raw parameter vector length " + std::to_string(raw.size()) +
                              " is not a multiple of 6");
    }
    HyperSchedule sched;
    sched.layers.resize(static_cast<std::size_t>(raw.size() / 6));
    Eigen::Index k = 0;
    for (auto& layer : sched.layers) {
        for (auto* p : {&layer.modality, &layer.spatial}) {
            p->alpha = std::exp(raw[k++]);
            p->beta = std::exp(raw[k++]);
            p->gamma = std::exp(raw[k++]);
        }
    }
    return sched;
}

HyperSchedule HyperSchedule::constant_init(int T, double value) {
    HyperSchedule sched;
    sched.layers.assign(static_cast<std::size_t>(T),
                        LayerParams{{value, value, value}, {value, value, value}});
    return sched;
}

HyperSchedule HyperSchedule::default_init(int T) {
    HyperSchedule sched;
    sched.layers.assign(static_cast<std::size_t>(T),
                        LayerParams{{1.5, 25.0, 0.5}, {1.0, 1.0, 1.0}});
    return sched;
}

namespace {

[[noreturn]] void rethrow_with_layer(const std::exception& e, int layer, const char* domain,
                                     const char* step) {
    throw numeric_error(std::string(step) + " failed at layer " + std::to_string(layer) +
                        " (" + domain + " domain): " + e.what());
}

}  // namespace

ForwardResult forward_from(const Matrix& Y, const HyperSchedule& sched,
                           const learn::PdsSettings& pds,
                           const std::vector<LayerState>& cached, int start_layer,
                           const ForwardOptions& opts) {
    const int T = sched.depth();
    if (static_cast<int>(Y.rows()) < 2 || static_cast<int>(Y.cols()) < 2) {
        throw dimension_error("forward needs at least a 2x2 signal, got " +
                              std::to_string(Y.rows()) + "x" + std::to_string(Y.cols()));
    }
    if (!sched.valid()) {
        throw config_error("hyper schedule has a nonpositive parameter");
    }
    if (start_layer < 0 || start_layer > T ||
        start_layer > static_cast<int>(cached.size())) {
        throw dimension_error("start layer " + std::to_string(start_layer) +
                              " outside cached trace of depth " + std::to_string(cached.size()));
    }

    const Matrix Yt = Y.transpose();

    ForwardResult result;
    if (opts.keep_trace) {
        result.trace.reserve(static_cast<std::size_t>(T));
        result.trace.assign(cached.begin(), cached.begin() + start_layer);
    }

    Matrix Xs = start_layer == 0 ? Y : cached[static_cast<std::size_t>(start_layer - 1)].spatial_signal;

    // Warm-start carries the previous layer's solutions by value.
    LaplacianVech vm, vs;
    bool have_warm = false;
    if (opts.warm_start && start_layer > 0) {
        vm = cached[static_cast<std::size_t>(start_layer - 1)].modality_graph;
        vs = cached[static_cast<std::size_t>(start_layer - 1)].spatial_graph;
        have_warm = true;
    }

    for (int t = start_layer; t < T; ++t) {
        const auto& layer = sched.layers[static_cast<std::size_t>(t)];

        try {
            vm = learn::pds_solve(Xs.transpose(), layer.modality, pds, nullptr,
                                  have_warm ? &vm : nullptr);
        } catch (const std::exception& e) {
            rethrow_with_layer(e, t, "modality", "graph learning");
        }
        Matrix Xm;
        try {
            Xm = smoothers::tikhonov_solve(vech_expand(vm), Yt, layer.modality.alpha);
        } catch (const std::exception& e) {
            rethrow_with_layer(e, t, "modality", "smoothing");
        }

        try {
            vs = learn::pds_solve(Xm.transpose(), layer.spatial, pds, nullptr,
                                  have_warm ? &vs : nullptr);
        } catch (const std::exception& e) {
            rethrow_with_layer(e, t, "spatial", "graph learning");
        }
        try {
            Xs = smoothers::tikhonov_solve(vech_expand(vs), Xm.transpose(), layer.spatial.alpha);
        } catch (const std::exception& e) {
            rethrow_with_layer(e, t, "spatial", "smoothing");
        }

        have_warm = opts.warm_start;
        if (opts.keep_trace) {
            result.trace.push_back(LayerState{vm, vs, std::move(Xm), Xs});
        }
    }

    result.denoised = std::move(Xs);
    return result;
}

ForwardResult forward(const Matrix& Y, const HyperSchedule& sched,
                      const learn::PdsSettings& pds, const ForwardOptions& opts) {
    return forward_from(Y, sched, pds, {}, 0, opts);
}

double rmse(const Matrix& X, const Matrix& Xstar) {
    if (X.rows() != Xstar.rows() || X.cols() != Xstar.cols()) {
        throw dimension_error("rmse shape mismatch: " + std::to_string(X.rows()) + "x" +
                              std::to_string(X.cols()) + " vs " + std::to_string(Xstar.rows()) +
                              "x" + std::to_string(Xstar.cols()));
    }
    return std::sqrt((X - Xstar).squaredNorm() / static_cast<double>(X.size()));
}

}  // namespace twofold::unrolled
