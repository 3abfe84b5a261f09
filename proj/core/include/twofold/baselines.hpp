#ifndef TWOFOLD_BASELINES_HPP
#define TWOFOLD_BASELINES_HPP

#include <string>
#include <vector>

#include "twofold/datagen.hpp"
#include "twofold/smoothers.hpp"

namespace twofold::baselines {

enum class Method { glpf, hd, svds };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

struct GridOptions {
    int grid_size = 20;
    double grid_min = 0.0;  // <= 0 selects the method default
    double grid_max = 0.0;
    int rbf_k = 6;
    double rbf_bandwidth = 0.0;  // <= 0 selects the median pairwise distance
};

struct FitResult {
    double fitted_param = 0.0;
    double fit_rmse = 0.0;               // mean RMSE on the fitting pairs
    double test_rmse = 0.0;              // mean RMSE on the test pairs
    std::vector<double> per_pair_rmse;   // test pairs, input order
};

/// Geometric grid of grid_size points over [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, int size);

/// Denoises one pair at the given scalar parameter. GLPF and HD operate on
/// a spatial RBF graph rebuilt from the pair's own noisy observation; SVDS
/// ignores the graph entirely.
Matrix apply_baseline(Method m, const datagen::DatasetPair& pair, double param,
                      const GridOptions& opt);

/// Grid-searches the baseline's scalar parameter on fit_pairs (mean RMSE)
/// and evaluates the winner on test_pairs.
FitResult fit_and_eval(Method m, const std::vector<datagen::DatasetPair>& fit_pairs,
                       const std::vector<datagen::DatasetPair>& test_pairs,
                       const GridOptions& opt);

}  // namespace twofold::baselines

#endif  // TWOFOLD_BASELINES_HPP
