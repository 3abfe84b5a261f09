#ifndef TWOFOLD_TOOLS_COMMANDS_HPP
#define TWOFOLD_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace twofold::cli {

// Exit codes shared by every subcommand.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_numeric = 4;

struct SynthOptions {
    std::string out;
    int count = 10;
    std::vector<double> sigmas{0.10, 0.15, 0.20, 0.25, 0.30};
    int n_s = 80;
    int n_m = 120;
    int k = 6;
    int clusters = 8;
    std::uint64_t seed = 0;
    bool force = false;
};

struct TrainOptions {
    std::string data;
    std::string out = "checkpoint.json";
    std::string history = "history.json";
    std::optional<double> sigma;  // restrict to one noise level
    int fold = 0;                 // fold trained on; complement validates
    int layers = 9;
    int epochs = 30;
    double lr = 0.01;
    int batch = 1;
    double fd_step = 1e-3;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::optional<double> init;  // uniform override; default is the tuned init
    double pds_eps = 1e-5;
    int pds_imax = 500;
    std::optional<double> pds_theta;
};

struct DenoiseOptions {
    std::string checkpoint;
    std::string out;
    // Single-matrix mode:
    std::string input;
    std::string truth;
    // Dataset mode:
    std::string data;
    std::optional<double> sigma;
    int fold = 1;  // fold to denoise (use the fold not trained on)
    int jobs = 1;
    bool pgm = false;
    double pds_eps = 1e-5;
    int pds_imax = 500;
    std::optional<double> pds_theta;
};

struct BaselineOptions {
    std::string data;
    std::string method;  // glpf | hd | svds
    std::string out = "metrics.json";
    std::optional<double> sigma;
    int fold = 0;  // fold used for parameter fitting; complement is tested
    int grid_size = 20;
    std::optional<double> grid_min;
    std::optional<double> grid_max;
    int rbf_k = 6;
    std::optional<double> rbf_bandwidth;
};

struct EvalOptions {
    std::vector<std::string> inputs;
    std::string out = "table";
};

int cmd_synth(const SynthOptions& opt);
int cmd_train(const TrainOptions& opt);
int cmd_denoise(const DenoiseOptions& opt);
int cmd_baseline(const BaselineOptions& opt);
int cmd_eval(const EvalOptions& opt);

}  // namespace twofold::cli

#endif  // TWOFOLD_TOOLS_COMMANDS_HPP
