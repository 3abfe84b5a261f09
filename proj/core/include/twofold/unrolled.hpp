#ifndef TWOFOLD_UNROLLED_HPP
#define TWOFOLD_UNROLLED_HPP

#include <vector>

#include "twofold/graph.hpp"
#include "twofold/graph_learn.hpp"

namespace twofold::unrolled {

/// Per-layer parameters for both domains (m = modality, s = spatial).
struct LayerParams {
    learn::LearnParams modality;
    learn::LearnParams spatial;
};

/// Trainable schedule: one LayerParams per layer, 6T positive values total.
struct HyperSchedule {
    std::vector<LayerParams> layers;

    int depth() const { return static_cast<int>(layers.size()); }
    bool valid() const;

    /// Flattens to the raw (log) parameter vector in order
    /// (t, m then s, alpha beta gamma).
    Vector to_raw() const;
    static HyperSchedule from_raw(const Vector& raw);

    /// Uniform initialization with every parameter at the given value.
    static HyperSchedule constant_init(int T, double value);

    /// Stock training initialization, tuned on the synthetic reference
    /// family: strong modality connectivity (modality graphs are learned
    /// from long spatial rows, so workable node degrees need beta well
    /// above the squared-distance scale) and neutral spatial parameters.
    static HyperSchedule default_init(int T);
};

/// State produced by one unrolled layer.
struct LayerState {
    LaplacianVech modality_graph;   // L_m^(t+1) in vech form (N_m nodes)
    LaplacianVech spatial_graph;    // L_s^(t+1) in vech form (N_s nodes)
    Matrix modality_signal;         // X_m^(t+1), N_m x N_s
    Matrix spatial_signal;          // X_s^(t+1), N_s x N_m
};

struct ForwardOptions {
    bool keep_trace = true;    // retain every layer (heatmaps, training caches)
    bool warm_start = false;   // seed each PDS solve from the previous layer
};

struct ForwardResult {
    Matrix denoised;                 // X_s^(T)
    std::vector<LayerState> trace;   // empty when keep_trace is false
};

/// Unrolled alternation: per layer, learn the modality graph from the
/// current spatial estimate, Tikhonov-smooth the original observation on
/// it, learn the spatial graph from that, and smooth again. The modality
/// smoothing step always re-anchors to Y^T, not to the running iterate.
ForwardResult forward(const Matrix& Y, const HyperSchedule& sched,
                      const learn::PdsSettings& pds, const ForwardOptions& opts = {});

/// Re-runs the forward pass from start_layer, taking X_s^(start_layer)
/// from a previously computed trace of the same Y. With start_layer == 0
/// this is exactly forward(). Layers [start_layer, T) are recomputed, so
/// schedules may differ from the cached run in those layers only.
ForwardResult forward_from(const Matrix& Y, const HyperSchedule& sched,
                           const learn::PdsSettings& pds,
                           const std::vector<LayerState>& cached, int start_layer,
                           const ForwardOptions& opts = {});

/// Root mean squared error over all entries.
double rmse(const Matrix& X, const Matrix& Xstar);

}  // namespace twofold::unrolled

#endif  // TWOFOLD_UNROLLED_HPP
