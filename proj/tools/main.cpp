#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "commands.hpp"
#include "twofold/errors.hpp"

namespace {

using nlohmann::json;
using namespace twofold;

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file " + path);
    }
    try {
        json doc;
        in >> doc;
        if (!doc.is_object()) {
            throw config_error("config file " + path + " must hold a JSON object");
        }
        return doc;
    } catch (const json::exception& e) {
        throw config_error("malformed config file " + path + ": " + e.what());
    }
}

// Precedence: explicit flags > config file > built-in defaults. A config
// value is applied only when the matching flag was not passed.
template <typename T>
void merge(const CLI::App& sub, const json& cfg, const std::string& flag, const std::string& key,
           T& target) {
    if (sub.count(flag) > 0 || !cfg.contains(key)) {
        return;
    }
    try {
        target = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("config key '" + key + "': " + e.what());
    }
}

template <typename T>
void merge(const CLI::App& sub, const json& cfg, const std::string& flag, const std::string& key,
           std::optional<T>& target) {
    if (sub.count(flag) > 0 || !cfg.contains(key)) {
        return;
    }
    try {
        target = cfg.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error("config key '" + key + "': " + e.what());
    }
}

// --seed > config "seed" > TWOFOLD_SEED > 0.
void resolve_seed(const CLI::App& sub, const json& cfg, std::uint64_t& seed) {
    if (sub.count("--seed") > 0 || cfg.contains("seed")) {
        return;
    }
    if (const char* env = std::getenv("TWOFOLD_SEED")) {
        try {
            seed = std::stoull(env);
        } catch (const std::exception&) {
            throw config_error(std::string("TWOFOLD_SEED is not an integer: ") + env);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal graph-signal denoising with twofold graph learning"};
    app.require_subcommand(1);

    cli::SynthOptions synth;
    cli::TrainOptions train;
    cli::DenoiseOptions denoise;
    cli::BaselineOptions baseline;
    cli::EvalOptions eval;
    std::string config_path;

    auto* s = app.add_subcommand("synth", "Generate a synthetic twofold dataset");
    s->add_option("--out", synth.out, "Output dataset directory");
    s->add_option("--count", synth.count, "Number of ground-truth graphs");
    s->add_option("--sigmas", synth.sigmas, "Noise levels")->delimiter(',');
    s->add_option("--ns", synth.n_s, "Spatial nodes");
    s->add_option("--nm", synth.n_m, "Modality nodes");
    s->add_option("--k", synth.k, "kNN neighbors for the sensor graph");
    s->add_option("--clusters", synth.clusters, "Modality communities");
    s->add_option("--seed", synth.seed, "Master RNG seed");
    s->add_flag("--force", synth.force, "Write into a non-empty directory");
    s->add_option("--config", config_path, "JSON config file");

    auto* t = app.add_subcommand("train", "Fit the per-layer hyperparameter schedule");
    t->add_option("--data", train.data, "Dataset directory from synth");
    t->add_option("--out", train.out, "Checkpoint path");
    t->add_option("--history", train.history, "History JSON path");
    t->add_option("--sigma", train.sigma, "Restrict to one noise level");
    t->add_option("--fold", train.fold, "Fold trained on (0 or 1)");
    t->add_option("--layers", train.layers, "Unrolled depth T");
    t->add_option("--epochs", train.epochs, "Training epochs");
    t->add_option("--lr", train.lr, "Learning rate");
    t->add_option("--batch", train.batch, "Pairs per optimizer step");
    t->add_option("--fd-step", train.fd_step, "Relative finite-difference step");
    t->add_option("--seed", train.seed, "Shuffling seed");
    t->add_option("--jobs", train.jobs, "Threads for gradient probes");
    t->add_option("--init", train.init,
                  "Uniform initial value for all parameters (default: tuned per-domain init)");
    t->add_option("--pds-eps", train.pds_eps, "Inner solver tolerance");
    t->add_option("--pds-imax", train.pds_imax, "Inner solver iteration cap");
    t->add_option("--pds-theta", train.pds_theta, "Inner solver step size (default auto)");
    t->add_option("--config", config_path, "JSON config file");

    auto* d = app.add_subcommand("denoise", "Denoise a matrix or a dataset fold");
    d->add_option("--checkpoint", denoise.checkpoint, "Trained checkpoint");
    d->add_option("--out", denoise.out, "Output directory");
    d->add_option("--input", denoise.input, "Noisy matrix CSV (single mode)");
    d->add_option("--truth", denoise.truth, "Ground-truth CSV for RMSE (single mode)");
    d->add_option("--data", denoise.data, "Dataset directory (dataset mode)");
    d->add_option("--sigma", denoise.sigma, "Restrict to one noise level");
    d->add_option("--fold", denoise.fold, "Fold to denoise (0 or 1)");
    d->add_option("--jobs", denoise.jobs, "Pair-level worker threads");
    d->add_flag("--pgm", denoise.pgm, "Also export grayscale PGM heatmaps");
    d->add_option("--pds-eps", denoise.pds_eps, "Inner solver tolerance");
    d->add_option("--pds-imax", denoise.pds_imax, "Inner solver iteration cap");
    d->add_option("--pds-theta", denoise.pds_theta, "Inner solver step size (default auto)");
    d->add_option("--config", config_path, "JSON config file");

    auto* b = app.add_subcommand("baseline", "Fit and evaluate a model-based baseline");
    b->add_option("--data", baseline.data, "Dataset directory");
    b->add_option("--method", baseline.method, "glpf, hd, or svds");
    b->add_option("--out", baseline.out, "Metrics JSON path");
    b->add_option("--sigma", baseline.sigma, "Restrict to one noise level");
    b->add_option("--fold", baseline.fold, "Fold used for fitting (0 or 1)");
    b->add_option("--grid-size", baseline.grid_size, "Geometric grid size");
    b->add_option("--grid-min", baseline.grid_min, "Grid lower bound");
    b->add_option("--grid-max", baseline.grid_max, "Grid upper bound");
    b->add_option("--rbf-k", baseline.rbf_k, "kNN sparsification for the RBF graph");
    b->add_option("--rbf-bandwidth", baseline.rbf_bandwidth,
                  "RBF bandwidth (default: median pairwise distance)");
    b->add_option("--config", config_path, "JSON config file");

    auto* e = app.add_subcommand("eval", "Merge metrics files into one RMSE table");
    e->add_option("--inputs", eval.inputs, "Metrics JSON files")->delimiter(',');
    e->add_option("--out", eval.out, "Output prefix (.json and .txt)");
    e->add_option("--config", config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? cli::exit_ok : cli::exit_config;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            cfg = load_config_file(config_path);
        }

        if (s->parsed()) {
            merge(*s, cfg, "--out", "out", synth.out);
            merge(*s, cfg, "--count", "count", synth.count);
            merge(*s, cfg, "--sigmas", "sigmas", synth.sigmas);
            merge(*s, cfg, "--ns", "n_s", synth.n_s);
            merge(*s, cfg, "--nm", "n_m", synth.n_m);
            merge(*s, cfg, "--k", "k", synth.k);
            merge(*s, cfg, "--clusters", "clusters", synth.clusters);
            merge(*s, cfg, "--seed", "seed", synth.seed);
            merge(*s, cfg, "--force", "force", synth.force);
            resolve_seed(*s, cfg, synth.seed);
            return cli::cmd_synth(synth);
        }
        if (t->parsed()) {
            merge(*t, cfg, "--data", "data", train.data);
            merge(*t, cfg, "--out", "out", train.out);
            merge(*t, cfg, "--history", "history", train.history);
            merge(*t, cfg, "--sigma", "sigma", train.sigma);
            merge(*t, cfg, "--fold", "fold", train.fold);
            merge(*t, cfg, "--layers", "layers", train.layers);
            merge(*t, cfg, "--epochs", "epochs", train.epochs);
            merge(*t, cfg, "--lr", "lr", train.lr);
            merge(*t, cfg, "--batch", "batch", train.batch);
            merge(*t, cfg, "--fd-step", "fd_step", train.fd_step);
            merge(*t, cfg, "--seed", "seed", train.seed);
            merge(*t, cfg, "--jobs", "jobs", train.jobs);
            merge(*t, cfg, "--init", "init", train.init);
            merge(*t, cfg, "--pds-eps", "pds_eps", train.pds_eps);
            merge(*t, cfg, "--pds-imax", "pds_imax", train.pds_imax);
            merge(*t, cfg, "--pds-theta", "pds_theta", train.pds_theta);
            resolve_seed(*t, cfg, train.seed);
            return cli::cmd_train(train);
        }
        if (d->parsed()) {
            merge(*d, cfg, "--checkpoint", "checkpoint", denoise.checkpoint);
            merge(*d, cfg, "--out", "out", denoise.out);
            merge(*d, cfg, "--input", "input", denoise.input);
            merge(*d, cfg, "--truth", "truth", denoise.truth);
            merge(*d, cfg, "--data", "data", denoise.data);
            merge(*d, cfg, "--sigma", "sigma", denoise.sigma);
            merge(*d, cfg, "--fold", "fold", denoise.fold);
            merge(*d, cfg, "--jobs", "jobs", denoise.jobs);
            merge(*d, cfg, "--pgm", "pgm", denoise.pgm);
            merge(*d, cfg, "--pds-eps", "pds_eps", denoise.pds_eps);
            merge(*d, cfg, "--pds-imax", "pds_imax", denoise.pds_imax);
            merge(*d, cfg, "--pds-theta", "pds_theta", denoise.pds_theta);
            return cli::cmd_denoise(denoise);
        }
        if (b->parsed()) {
            merge(*b, cfg, "--data", "data", baseline.data);
            merge(*b, cfg, "--method", "method", baseline.method);
            merge(*b, cfg, "--out", "out", baseline.out);
            merge(*b, cfg, "--sigma", "sigma", baseline.sigma);
            merge(*b, cfg, "--fold", "fold", baseline.fold);
            merge(*b, cfg, "--grid-size", "grid_size", baseline.grid_size);
            merge(*b, cfg, "--grid-min", "grid_min", baseline.grid_min);
            merge(*b, cfg, "--grid-max", "grid_max", baseline.grid_max);
            merge(*b, cfg, "--rbf-k", "rbf_k", baseline.rbf_k);
            merge(*b, cfg, "--rbf-bandwidth", "rbf_bandwidth", baseline.rbf_bandwidth);
            return cli::cmd_baseline(baseline);
        }
        if (e->parsed()) {
            merge(*e, cfg, "--inputs", "inputs", eval.inputs);
            merge(*e, cfg, "--out", "out", eval.out);
            return cli::cmd_eval(eval);
        }
    } catch (const config_error& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return cli::exit_config;
    } catch (const data_error& err) {
        std::cerr << "data error: " << err.what() << '\n';
        return cli::exit_data;
    } catch (const numeric_error& err) {
        std::cerr << "numeric error: " << err.what() << '\n';
        return cli::exit_numeric;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return cli::exit_data;
    }
    return cli::exit_ok;
}
