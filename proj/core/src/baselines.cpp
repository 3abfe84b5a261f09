#include "twofold/baselines.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

#include "twofold/unrolled.hpp"

namespace twofold::baselines {

Method method_from_name(const std::string& name) {
    if (name == "glpf") return Method::glpf;
    if (name == "hd") return Method::hd;
    if (name == "svds") return Method::svds;
    throw config_error("unknown baseline '" + name + "' (expected glpf, hd, or svds)");
}

std::string method_name(Method m) {
    switch (m) {
        case Method::glpf: return "glpf";
        case Method::hd: return "hd";
        case Method::svds: return "svds";
    }
    return "?";
}

std::vector<double> geometric_grid(double lo, double hi, int size) {
    if (!(lo > 0.0) || hi < lo || size < 1) {
        throw config_error("invalid geometric grid [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "] with " + std::to_string(size) + " points");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(size));
    if (size == 1) {
        grid.push_back(lo);
        return grid;
    }
    const double step = std::pow(hi / lo, 1.0 / (size - 1));
    double value = lo;
    for (int i = 0; i < size; ++i, value *= step) {
        grid.push_back(value);
    }
    return grid;
}

namespace {

SpectralDecomposition spatial_decomposition(const datagen::DatasetPair& pair,
                                            const GridOptions& opt) {
    const Graph g = datagen::rbf_graph(pair.Y, opt.rbf_bandwidth, opt.rbf_k);
    return eigendecompose(build_laplacian(g));
}

Matrix apply_with_decomp(Method m, const datagen::DatasetPair& pair,
                         const SpectralDecomposition* decomp, double param) {
    if (m == Method::svds) {
        return smoothers::svds_denoise(pair.Y, param);
    }
    smoothers::FilterKernel kernel;
    kernel.kind = m == Method::glpf ? smoothers::FilterKernel::Kind::glpf
                                    : smoothers::FilterKernel::Kind::heat;
    kernel.param = param;
    return smoothers::spectral_filter(*decomp, pair.Y, kernel);
}

}  // namespace

Matrix apply_baseline(Method m, const datagen::DatasetPair& pair, double param,
                      const GridOptions& opt) {
    if (m == Method::svds) {
        return apply_with_decomp(m, pair, nullptr, param);
    }
    const SpectralDecomposition decomp = spatial_decomposition(pair, opt);
    return apply_with_decomp(m, pair, &decomp, param);
}

FitResult fit_and_eval(Method m, const std::vector<datagen::DatasetPair>& fit_pairs,
                       const std::vector<datagen::DatasetPair>& test_pairs,
                       const GridOptions& opt) {
    if (fit_pairs.empty() || test_pairs.empty()) {
        throw data_error("baseline fitting needs nonempty fit and test sets");
    }

    double lo = opt.grid_min;
    double hi = opt.grid_max;
    if (m == Method::svds) {
        if (lo <= 0.0 || hi <= 0.0) {
            double s1 = 0.0;
            for (const auto& p : fit_pairs) {
                s1 += Eigen::JacobiSVD<Matrix>(p.Y).singularValues()(0);
            }
            s1 /= static_cast<double>(fit_pairs.size());
            if (lo <= 0.0) lo = 1e-4 * s1;
            if (hi <= 0.0) hi = 1.2 * s1;
        }
    } else {
        if (lo <= 0.0) lo = 1e-3;
        if (hi <= 0.0) hi = 1e3;
    }
    const std::vector<double> grid = geometric_grid(lo, hi, opt.grid_size);

    // One decomposition per pair, shared across all grid points.
    std::vector<SpectralDecomposition> fit_decomps, test_decomps;
    if (m != Method::svds) {
        for (const auto& p : fit_pairs) fit_decomps.push_back(spatial_decomposition(p, opt));
        for (const auto& p : test_pairs) test_decomps.push_back(spatial_decomposition(p, opt));
    }

    FitResult result;
    result.fit_rmse = std::numeric_limits<double>::infinity();
    for (double param : grid) {
        double acc = 0.0;
        for (std::size_t i = 0; i < fit_pairs.size(); ++i) {
            const auto* d = m == Method::svds ? nullptr : &fit_decomps[i];
            acc += unrolled::rmse(apply_with_decomp(m, fit_pairs[i], d, param),
                                  fit_pairs[i].Xstar);
        }
        acc /= static_cast<double>(fit_pairs.size());
        if (acc < result.fit_rmse) {
            result.fit_rmse = acc;
            result.fitted_param = param;
        }
    }

    double acc = 0.0;
    for (std::size_t i = 0; i < test_pairs.size(); ++i) {
        const auto* d = m == Method::svds ? nullptr : &test_decomps[i];
        const double r = unrolled::rmse(
            apply_with_decomp(m, test_pairs[i], d, result.fitted_param), test_pairs[i].Xstar);
        result.per_pair_rmse.push_back(r);
        acc += r;
    }
    result.test_rmse = acc / static_cast<double>(test_pairs.size());
    return result;
}

}  // namespace twofold::baselines
