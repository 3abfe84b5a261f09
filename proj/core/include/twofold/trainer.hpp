#ifndef TWOFOLD_TRAINER_HPP
#define TWOFOLD_TRAINER_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "twofold/datagen.hpp"
#include "twofold/unrolled.hpp"

namespace twofold::train {

/// Strictly-positive parameter through an unconstrained exponential
/// reparameterization: value() = exp(raw) > 0 for every finite raw.
struct PositiveParam {
    double raw = 0.0;

    double value() const;
    static PositiveParam from_value(double v);
};

struct TrainConfig {
    int epochs = 30;
    double learning_rate = 0.01;
    int batch = 1;           // pairs per optimizer step
    double fd_step = 1e-3;   // relative central-difference step
    std::uint64_t seed = 0;
    int jobs = 1;            // worker threads for finite-difference probes
    learn::PdsSettings pds = learn::PdsSettings::for_unrolled();

    void validate() const;
};

/// Mean squared error; equals rmse(X, Xstar)^2.
double loss(const Matrix& X, const Matrix& Xstar);

struct GradResult {
    Vector grad;        // d loss / d raw parameters, length 6T
    double loss_value;  // loss at the unperturbed schedule
    int flagged = 0;    // coordinates zeroed because a probe went non-finite
};

/// Central-difference gradient of loss(forward(Y, .), Xstar) with respect
/// to the raw (log) parameters. The per-coordinate step is
/// fd_step * max(1, |raw|). Probes for a layer-t parameter reuse the
/// cached trace of layers 0..t-1, which is exact because earlier layers do
/// not depend on later parameters. Probes run on cfg.jobs threads;
/// non-finite probe losses zero the coordinate and emit a warning.
GradResult grad_estimate(const unrolled::HyperSchedule& sched, const datagen::DatasetPair& pair,
                         const TrainConfig& cfg);

/// Plain central differences of an arbitrary scalar function, same
/// stepping rule as grad_estimate. Used by tests as an uncached oracle.
Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x0,
                          double rel_step);

struct TrainHistory {
    std::vector<double> train_loss;  // mean per-pair loss per epoch
    std::vector<double> val_loss;    // mean validation loss per epoch
    double initial_val_loss = 0.0;
    int best_epoch = 0;  // 0 = initialization, 1-based otherwise
};

/// Adaptive-moment descent (decay 0.9/0.999, eps 1e-8) on the raw
/// parameters, shuffling pairs each epoch from cfg.seed. Returns the
/// schedule with the best validation loss seen (initialization included)
/// and the per-epoch history.
std::pair<unrolled::HyperSchedule, TrainHistory> train(
    const std::vector<datagen::DatasetPair>& train_pairs,
    const std::vector<datagen::DatasetPair>& val_pairs, const TrainConfig& cfg,
    const unrolled::HyperSchedule& init);

/// Checkpoint JSON: {format_version, T, raw_params}, with raw parameters
/// flattened in order (t, m then s, alpha beta gamma). extra_json, when
/// nonempty, must be a JSON object whose fields are merged in.
void save_checkpoint(const std::filesystem::path& path, const unrolled::HyperSchedule& sched,
                     const std::string& extra_json = "");
unrolled::HyperSchedule load_checkpoint(const std::filesystem::path& path);

}  // namespace twofold::train

#endif  // TWOFOLD_TRAINER_HPP
