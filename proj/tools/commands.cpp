#include "commands.hpp"

#include <json.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "twofold/baselines.hpp"
#include "twofold/csv.hpp"
#include "twofold/datagen.hpp"
#include "twofold/smoothers.hpp"
#include "twofold/trainer.hpp"
#include "twofold/unrolled.hpp"

namespace twofold::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int format_version = 1;

void write_json_file(const fs::path& path, const json& doc) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) {
            throw data_error("cannot write " + tmp.string());
        }
        out << doc.dump(2) << '\n';
    }
    fs::rename(tmp, path);
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open " + path.string());
    }
    try {
        json doc;
        in >> doc;
        return doc;
    } catch (const json::exception& e) {
        throw parse_error("malformed JSON in " + path.string() + ": " + e.what());
    }
}

std::string sigma_label(double sigma) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", sigma);
    return buf;
}

// One pair directory of a synthesized dataset.
struct PairEntry {
    fs::path dir;
    long index = 0;
    int graph_index = 0;
    double sigma = 0.0;
};

std::vector<PairEntry> scan_dataset(const fs::path& root) {
    if (!fs::is_directory(root)) {
        throw data_error("dataset directory " + root.string() + " does not exist");
    }
    std::vector<PairEntry> entries;
    for (const auto& item : fs::directory_iterator(root)) {
        if (!item.is_directory()) continue;
        const std::string name = item.path().filename().string();
        if (name.rfind("pair_", 0) != 0) continue;
        PairEntry e;
        e.dir = item.path();
        e.index = std::stol(name.substr(5));
        const json meta = read_json_file(e.dir / "meta.json");
        e.graph_index = meta.at("graph_index").get<int>();
        e.sigma = meta.at("sigma").get<double>();
        entries.push_back(std::move(e));
    }
    if (entries.empty()) {
        throw data_error("no pair_* directories under " + root.string());
    }
    std::sort(entries.begin(), entries.end(),
              [](const PairEntry& a, const PairEntry& b) { return a.index < b.index; });
    return entries;
}

datagen::DatasetPair load_pair(const PairEntry& e) {
    datagen::DatasetPair pair;
    pair.Xstar = csv::load_matrix(e.dir / "X.csv");
    pair.Y = csv::load_matrix(e.dir / "Y.csv");
    pair.sigma = e.sigma;
    if (pair.Y.rows() != pair.Xstar.rows() || pair.Y.cols() != pair.Xstar.cols()) {
        throw data_error("X/Y shape mismatch in " + e.dir.string());
    }
    return pair;
}

bool sigma_matches(double a, double b) {
    return std::abs(a - b) < 1e-9;
}

// Splits graph indices 50/50; fold 0 is the first half.
std::set<int> fold_graphs(const std::vector<PairEntry>& entries, int fold) {
    if (fold != 0 && fold != 1) {
        throw config_error("fold must be 0 or 1, got " + std::to_string(fold));
    }
    std::set<int> all;
    for (const auto& e : entries) {
        all.insert(e.graph_index);
    }
    std::vector<int> sorted(all.begin(), all.end());
    const std::size_t half = sorted.size() / 2;
    std::set<int> chosen;
    if (fold == 0) {
        chosen.insert(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(half));
    } else {
        chosen.insert(sorted.begin() + static_cast<std::ptrdiff_t>(half), sorted.end());
    }
    return chosen;
}

std::vector<double> sorted_sigmas(const std::vector<PairEntry>& entries,
                                  const std::optional<double>& only) {
    std::vector<double> sigmas;
    for (const auto& e : entries) {
        if (only && !sigma_matches(e.sigma, *only)) continue;
        bool seen = false;
        for (double s : sigmas) {
            if (sigma_matches(s, e.sigma)) {
                seen = true;
                break;
            }
        }
        if (!seen) sigmas.push_back(e.sigma);
    }
    if (sigmas.empty()) {
        throw data_error(only ? "no pairs at sigma=" + sigma_label(*only)
                              : "no pairs in dataset");
    }
    std::sort(sigmas.begin(), sigmas.end());
    return sigmas;
}

void write_pgm(const fs::path& path, const Matrix& W) {
    const double wmax = W.maxCoeff();
    std::ofstream out(path);
    if (!out) {
        throw data_error("cannot write " + path.string());
    }
    out << "P2\n" << W.cols() << ' ' << W.rows() << "\n255\n";
    for (Eigen::Index i = 0; i < W.rows(); ++i) {
        for (Eigen::Index j = 0; j < W.cols(); ++j) {
            const int v = wmax > 0.0 ? static_cast<int>(std::lround(255.0 * W(i, j) / wmax)) : 0;
            out << v << (j + 1 < W.cols() ? ' ' : '\n');
        }
    }
}

void export_layer_graphs(const fs::path& dir, const std::vector<unrolled::LayerState>& trace,
                         bool pgm) {
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const Matrix Wm = adjacency_from_vech(trace[t].modality_graph);
        const Matrix Ws = adjacency_from_vech(trace[t].spatial_graph);
        const std::string suffix = "_layer" + std::to_string(t + 1) + ".csv";
        csv::save_matrix(dir / ("Wm" + suffix), Wm);
        csv::save_matrix(dir / ("Ws" + suffix), Ws);
        if (pgm) {
            write_pgm(dir / ("Wm_layer" + std::to_string(t + 1) + ".pgm"), Wm);
            write_pgm(dir / ("Ws_layer" + std::to_string(t + 1) + ".pgm"), Ws);
        }
    }
}

learn::PdsSettings pds_from(double eps, int imax, const std::optional<double>& theta) {
    learn::PdsSettings s;
    s.epsilon = eps;
    s.i_max = imax;
    s.theta = theta;
    if (!s.valid()) {
        throw config_error("invalid PDS settings (eps=" + std::to_string(eps) +
                           ", i_max=" + std::to_string(imax) + ")");
    }
    return s;
}

json pds_echo(const learn::PdsSettings& s) {
    json j{{"epsilon", s.epsilon}, {"i_max", s.i_max}};
    if (s.theta) {
        j["theta"] = *s.theta;
    } else {
        j["theta"] = "auto";
    }
    return j;
}

}  // namespace

int cmd_synth(const SynthOptions& opt) {
    if (opt.out.empty()) {
        throw config_error("synth requires --out");
    }
    if (opt.count < 1) {
        throw config_error("count must be >= 1");
    }
    if (opt.sigmas.empty()) {
        throw config_error("at least one sigma is required");
    }
    for (double s : opt.sigmas) {
        if (s < 0.0) throw config_error("sigma must be >= 0");
    }

    const fs::path root(opt.out);
    if (fs::exists(root) && !fs::is_empty(root) && !opt.force) {
        throw config_error("output directory " + root.string() +
                           " is not empty; pass --force to overwrite");
    }
    fs::create_directories(root);

    const json config_echo{{"out", opt.out},     {"count", opt.count},
                           {"sigmas", opt.sigmas}, {"n_s", opt.n_s},
                           {"n_m", opt.n_m},     {"k", opt.k},
                           {"clusters", opt.clusters}, {"seed", opt.seed},
                           {"force", opt.force}};

    std::mt19937_64 master(opt.seed);
    long pair_index = 0;
    for (int g = 0; g < opt.count; ++g) {
        const std::uint64_t graph_seed = master();
        datagen::SynthConfig cfg;
        cfg.n_s = opt.n_s;
        cfg.n_m = opt.n_m;
        cfg.k = opt.k;
        cfg.clusters = opt.clusters;
        cfg.sigma = 0.0;
        cfg.seed = graph_seed;
        const datagen::DatasetPair clean = datagen::gen_multimodal(cfg);

        for (double sigma : opt.sigmas) {
            const std::uint64_t noise_seed = master();
            Matrix Y = clean.Xstar;
            if (sigma > 0.0) {
                std::mt19937_64 rng(noise_seed);
                std::normal_distribution<double> normal(0.0, 1.0);
                for (Eigen::Index j = 0; j < Y.cols(); ++j) {
                    for (Eigen::Index i = 0; i < Y.rows(); ++i) {
                        Y(i, j) += sigma * normal(rng);
                    }
                }
            }

            const fs::path dir = root / ("pair_" + std::to_string(pair_index));
            fs::create_directories(dir);
            csv::save_matrix(dir / "X.csv", clean.Xstar);
            csv::save_matrix(dir / "Y.csv", Y);
            csv::save_matrix(dir / "Ws.csv", clean.gt_spatial->weights);
            csv::save_matrix(dir / "Wm.csv", clean.gt_modality->weights);
            json meta{{"format_version", format_version},
                      {"graph_index", g},
                      {"sigma", sigma},
                      {"graph_seed", graph_seed},
                      {"noise_seed", noise_seed},
                      {"config", config_echo}};
            write_json_file(dir / "meta.json", meta);
            ++pair_index;
        }
    }
    std::cout << "wrote " << pair_index << " pairs under " << root.string() << '\n';
    return exit_ok;
}

int cmd_train(const TrainOptions& opt) {
    if (opt.data.empty()) {
        throw config_error("train requires --data");
    }
    if (opt.layers < 0) {
        throw config_error("layers must be >= 0");
    }
    if (opt.init && !(*opt.init > 0.0)) {
        throw config_error("init must be > 0");
    }

    const auto entries = scan_dataset(opt.data);
    const auto train_set = fold_graphs(entries, opt.fold);

    std::vector<datagen::DatasetPair> train_pairs, val_pairs;
    for (const auto& e : entries) {
        if (opt.sigma && !sigma_matches(e.sigma, *opt.sigma)) continue;
        (train_set.count(e.graph_index) ? train_pairs : val_pairs).push_back(load_pair(e));
    }
    if (train_pairs.empty() || val_pairs.empty()) {
        throw data_error("fold split left an empty side: " + std::to_string(train_pairs.size()) +
                         " train / " + std::to_string(val_pairs.size()) + " val pairs");
    }

    train::TrainConfig cfg;
    cfg.epochs = opt.epochs;
    cfg.learning_rate = opt.lr;
    cfg.batch = opt.batch;
    cfg.fd_step = opt.fd_step;
    cfg.seed = opt.seed;
    cfg.jobs = opt.jobs;
    cfg.pds = pds_from(opt.pds_eps, opt.pds_imax, opt.pds_theta);

    const auto init = opt.init ? unrolled::HyperSchedule::constant_init(opt.layers, *opt.init)
                               : unrolled::HyperSchedule::default_init(opt.layers);
    const auto [sched, history] = train::train(train_pairs, val_pairs, cfg, init);

    json config_echo{{"data", opt.data},       {"out", opt.out},
                     {"history", opt.history}, {"fold", opt.fold},
                     {"layers", opt.layers},   {"epochs", opt.epochs},
                     {"lr", opt.lr},           {"batch", opt.batch},
                     {"fd_step", opt.fd_step}, {"seed", opt.seed},
                     {"jobs", opt.jobs},       {"pds", pds_echo(cfg.pds)}};
    if (opt.init) config_echo["init"] = *opt.init;
    if (opt.sigma) config_echo["sigma"] = *opt.sigma;

    json extra{{"config", config_echo},
               {"n_s", train_pairs.front().Y.rows()},
               {"n_m", train_pairs.front().Y.cols()},
               {"best_epoch", history.best_epoch}};
    train::save_checkpoint(opt.out, sched, extra.dump());

    json hist{{"format_version", format_version},
              {"config", config_echo},
              {"initial_val_loss", history.initial_val_loss},
              {"train_loss", history.train_loss},
              {"val_loss", history.val_loss},
              {"best_epoch", history.best_epoch}};
    write_json_file(opt.history, hist);

    std::cout << "checkpoint " << opt.out << " (best epoch " << history.best_epoch << ")\n";
    return exit_ok;
}

namespace {

struct DenoiseOutcome {
    double rmse = std::numeric_limits<double>::quiet_NaN();
    bool has_rmse = false;
};

DenoiseOutcome denoise_one(const Matrix& Y, const Matrix* truth,
                           const unrolled::HyperSchedule& sched, const learn::PdsSettings& pds,
                           const fs::path& outdir, bool pgm) {
    fs::create_directories(outdir);
    const auto result = unrolled::forward(Y, sched, pds, {/*keep_trace=*/true, false});
    csv::save_matrix(outdir / "Xhat.csv", result.denoised);
    export_layer_graphs(outdir, result.trace, pgm);
    DenoiseOutcome outcome;
    if (truth) {
        outcome.rmse = unrolled::rmse(result.denoised, *truth);
        outcome.has_rmse = true;
    }
    return outcome;
}

}  // namespace

int cmd_denoise(const DenoiseOptions& opt) {
    if (opt.checkpoint.empty() || opt.out.empty()) {
        throw config_error("denoise requires --checkpoint and --out");
    }
    const bool single = !opt.input.empty();
    const bool dataset = !opt.data.empty();
    if (single == dataset) {
        throw config_error("denoise needs exactly one of --input or --data");
    }

    const auto sched = train::load_checkpoint(opt.checkpoint);
    const json ck = read_json_file(opt.checkpoint);
    const auto pds = pds_from(opt.pds_eps, opt.pds_imax, opt.pds_theta);

    auto check_dims = [&](const Matrix& Y) {
        if (ck.contains("n_s") && ck.contains("n_m")) {
            const auto n_s = ck["n_s"].get<Eigen::Index>();
            const auto n_m = ck["n_m"].get<Eigen::Index>();
            if (Y.rows() != n_s || Y.cols() != n_m) {
                throw data_error("input is " + std::to_string(Y.rows()) + "x" +
                                 std::to_string(Y.cols()) + " but checkpoint was trained on " +
                                 std::to_string(n_s) + "x" + std::to_string(n_m));
            }
        }
    };

    json config_echo{{"checkpoint", opt.checkpoint},
                     {"out", opt.out},
                     {"fold", opt.fold},
                     {"jobs", opt.jobs},
                     {"pgm", opt.pgm},
                     {"pds", pds_echo(pds)}};
    if (single) config_echo["input"] = opt.input;
    if (!opt.truth.empty()) config_echo["truth"] = opt.truth;
    if (dataset) config_echo["data"] = opt.data;
    if (opt.sigma) config_echo["sigma"] = *opt.sigma;

    const fs::path outroot(opt.out);
    fs::create_directories(outroot);

    if (single) {
        const Matrix Y = csv::load_matrix(opt.input);
        check_dims(Y);
        Matrix truth;
        const bool has_truth = !opt.truth.empty();
        if (has_truth) {
            truth = csv::load_matrix(opt.truth);
        }
        const auto outcome =
            denoise_one(Y, has_truth ? &truth : nullptr, sched, pds, outroot, opt.pgm);
        json metrics{{"format_version", format_version}, {"config", config_echo}};
        if (outcome.has_rmse) {
            metrics["rmse"] = outcome.rmse;
        }
        write_json_file(outroot / "metrics.json", metrics);
        return exit_ok;
    }

    // Dataset mode: denoise every pair of the requested fold.
    const auto entries = scan_dataset(opt.data);
    const auto graphs = fold_graphs(entries, opt.fold);
    std::vector<const PairEntry*> selected;
    for (const auto& e : entries) {
        if (opt.sigma && !sigma_matches(e.sigma, *opt.sigma)) continue;
        if (!graphs.count(e.graph_index)) continue;
        selected.push_back(&e);
    }
    if (selected.empty()) {
        throw data_error("no pairs match the requested sigma/fold");
    }

    std::vector<DenoiseOutcome> outcomes(selected.size());
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
        try {
            for (std::size_t i = cursor.fetch_add(1); i < selected.size();
                 i = cursor.fetch_add(1)) {
                const PairEntry& e = *selected[i];
                const auto pair = load_pair(e);
                check_dims(pair.Y);
                outcomes[i] = denoise_one(pair.Y, &pair.Xstar, sched, pds,
                                          outroot / e.dir.filename(), opt.pgm);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    const int n_threads = std::max(1, std::min<int>(opt.jobs, static_cast<int>(selected.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    json results = json::array();
    for (double sigma : sorted_sigmas(entries, opt.sigma)) {
        json per_pair = json::array();
        double acc = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < selected.size(); ++i) {
            if (!sigma_matches(selected[i]->sigma, sigma)) continue;
            per_pair.push_back(json{{"pair", selected[i]->index},
                                    {"graph_index", selected[i]->graph_index},
                                    {"rmse", outcomes[i].rmse}});
            acc += outcomes[i].rmse;
            ++count;
        }
        if (count == 0) continue;
        results.push_back(json{{"sigma", sigma},
                               {"per_pair", per_pair},
                               {"rmse", acc / count}});
    }
    json metrics{{"format_version", format_version},
                 {"config", config_echo},
                 {"method", "mgsd-llap-dau"},
                 {"results", results}};
    write_json_file(outroot / "metrics.json", metrics);
    std::cout << "denoised " << selected.size() << " pairs into " << outroot.string() << '\n';
    return exit_ok;
}

int cmd_baseline(const BaselineOptions& opt) {
    if (opt.data.empty()) {
        throw config_error("baseline requires --data");
    }
    const baselines::Method method = baselines::method_from_name(opt.method);
    if (opt.grid_size < 1) {
        throw config_error("grid-size must be >= 1");
    }

    const auto entries = scan_dataset(opt.data);
    const auto fit_graphs = fold_graphs(entries, opt.fold);
    const auto sigmas = sorted_sigmas(entries, opt.sigma);

    json config_echo{{"data", opt.data},          {"method", opt.method},
                     {"out", opt.out},            {"fold", opt.fold},
                     {"grid_size", opt.grid_size}, {"rbf_k", opt.rbf_k}};
    if (opt.sigma) config_echo["sigma"] = *opt.sigma;
    if (opt.grid_min) config_echo["grid_min"] = *opt.grid_min;
    if (opt.grid_max) config_echo["grid_max"] = *opt.grid_max;
    if (opt.rbf_bandwidth) config_echo["rbf_bandwidth"] = *opt.rbf_bandwidth;

    baselines::GridOptions grid_opt;
    grid_opt.grid_size = opt.grid_size;
    grid_opt.grid_min = opt.grid_min.value_or(0.0);
    grid_opt.grid_max = opt.grid_max.value_or(0.0);
    grid_opt.rbf_k = opt.rbf_k;
    grid_opt.rbf_bandwidth = opt.rbf_bandwidth.value_or(0.0);

    json results = json::array();
    for (double sigma : sigmas) {
        std::vector<const PairEntry*> fit_entries, test_entries;
        for (const auto& e : entries) {
            if (!sigma_matches(e.sigma, sigma)) continue;
            (fit_graphs.count(e.graph_index) ? fit_entries : test_entries).push_back(&e);
        }
        if (fit_entries.empty() || test_entries.empty()) {
            throw data_error("sigma=" + sigma_label(sigma) +
                             " lacks pairs on one side of the fold split");
        }
        std::vector<datagen::DatasetPair> fit_pairs, test_pairs;
        for (const auto* e : fit_entries) fit_pairs.push_back(load_pair(*e));
        for (const auto* e : test_entries) test_pairs.push_back(load_pair(*e));

        const auto fit = baselines::fit_and_eval(method, fit_pairs, test_pairs, grid_opt);

        json per_pair = json::array();
        for (std::size_t i = 0; i < test_entries.size(); ++i) {
            per_pair.push_back(json{{"pair", test_entries[i]->index},
                                    {"graph_index", test_entries[i]->graph_index},
                                    {"rmse", fit.per_pair_rmse[i]}});
        }
        results.push_back(json{{"sigma", sigma},
                               {"fitted_param", fit.fitted_param},
                               {"fit_rmse", fit.fit_rmse},
                               {"per_pair", per_pair},
                               {"rmse", fit.test_rmse}});
    }

    json metrics{{"format_version", format_version},
                 {"config", config_echo},
                 {"method", opt.method},
                 {"results", results}};
    write_json_file(opt.out, metrics);
    std::cout << "baseline " << opt.method << " metrics written to " << opt.out << '\n';
    return exit_ok;
}

int cmd_eval(const EvalOptions& opt) {
    if (opt.inputs.empty()) {
        throw config_error("eval requires --inputs");
    }
    std::vector<std::string> missing;
    for (const auto& path : opt.inputs) {
        if (!fs::exists(path)) {
            missing.push_back(path);
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing metrics file(s):";
        for (const auto& m : missing) msg += " " + m;
        throw data_error(msg);
    }

    // method -> sigma -> rmse (mean over per-pair values when present)
    std::map<std::string, std::map<double, double>> table;
    std::vector<double> sigmas;
    for (const auto& path : opt.inputs) {
        const json doc = read_json_file(path);
        const std::string method = doc.at("method").get<std::string>();
        for (const auto& row : doc.at("results")) {
            const double sigma = row.at("sigma").get<double>();
            double value;
            if (row.contains("per_pair") && !row["per_pair"].empty()) {
                double acc = 0.0;
                for (const auto& p : row["per_pair"]) {
                    acc += p.at("rmse").get<double>();
                }
                value = acc / row["per_pair"].size();
            } else {
                value = row.at("rmse").get<double>();
            }
            table[method][sigma] = value;
            bool seen = false;
            for (double s : sigmas) {
                if (sigma_matches(s, sigma)) {
                    seen = true;
                    break;
                }
            }
            if (!seen) sigmas.push_back(sigma);
        }
    }
    std::sort(sigmas.begin(), sigmas.end());

    json config_echo{{"inputs", opt.inputs}, {"out", opt.out}};
    json methods = json::object();
    for (const auto& [method, row] : table) {
        json cells = json::object();
        for (const auto& [sigma, value] : row) {
            cells[sigma_label(sigma)] = value;
        }
        methods[method] = cells;
    }
    json doc{{"format_version", format_version},
             {"config", config_echo},
             {"sigmas", sigmas},
             {"methods", methods}};
    write_json_file(opt.out + ".json", doc);

    std::ostringstream text;
    std::size_t name_w = 8;
    for (const auto& [method, row] : table) {
        name_w = std::max(name_w, method.size());
    }
    text << std::left;
    text.width(static_cast<std::streamsize>(name_w + 2));
    text << "method";
    for (double s : sigmas) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%8s", sigma_label(s).c_str());
        text << buf;
    }
    text << '\n';
    for (const auto& [method, row] : table) {
        text << std::left;
        text.width(static_cast<std::streamsize>(name_w + 2));
        text << method;
        for (double s : sigmas) {
            char buf[16];
            auto it = row.end();
            for (auto probe = row.begin(); probe != row.end(); ++probe) {
                if (sigma_matches(probe->first, s)) {
                    it = probe;
                    break;
                }
            }
            if (it != row.end()) {
                std::snprintf(buf, sizeof buf, "%8.4f", it->second);
            } else {
                std::snprintf(buf, sizeof buf, "%8s", "-");
            }
            text << buf;
        }
        text << '\n';
    }
    {
        const fs::path txt_path(opt.out + ".txt");
        std::ofstream out(txt_path);
        if (!out) {
            throw data_error("cannot write " + txt_path.string());
        }
        out << text.str();
    }
    std::cout << text.str();
    return exit_ok;
}

}  // namespace twofold::cli
