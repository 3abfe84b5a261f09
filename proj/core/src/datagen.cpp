#include "twofold/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace twofold::datagen {

void SynthConfig::validate() const {
    if (n_s < k + 1) {
        throw config_error("n_s=" + std::to_string(n_s) + " must exceed k=" + std::to_string(k));
    }
    if (clusters < 1 || clusters > n_m) {
        throw config_error("clusters=" + std::to_string(clusters) + " must be in [1, n_m=" +
                           std::to_string(n_m) + "]");
    }
    if (sigma < 0.0) {
        throw config_error("sigma must be >= 0, got " + std::to_string(sigma));
    }
    if (n_m < 2 || n_s < 2) {
        throw config_error("need at least 2 nodes per domain");
    }
}

Graph gen_sensor_graph(int n, int k, std::uint64_t seed) {
    if (n <= k) {
        throw config_error("sensor graph needs n > k, got n=" + std::to_string(n) +
                           ", k=" + std::to_string(k));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Matrix coords(n, 2);
    for (int i = 0; i < n; ++i) {
        coords(i, 0) = unit(rng);
        coords(i, 1) = unit(rng);
    }

    Matrix dist(n, n);
    for (int i = 0; i < n; ++i) {
        dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d = (coords.row(i) - coords.row(j)).norm();
            dist(i, j) = d;
            dist(j, i) = d;
        }
    }

    // kNN selection, symmetrized by union.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep(n, n);
    keep.setConstant(false);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
            return a < b;  // deterministic tie-break
        });
        int taken = 0;
        for (int j : order) {
            if (j == i) continue;
            keep(i, j) = true;
            keep(j, i) = true;
            if (++taken == k) break;
        }
    }

    double d_max = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (keep(i, j)) {
                d_max = std::max(d_max, dist(i, j));
            }
        }
    }

    Graph g;
    g.n = n;
    g.weights = Matrix::Zero(n, n);
    constexpr double weight_floor = 1e-8;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (keep(i, j)) {
                const double w =
                    d_max > 0.0 ? std::max(1.0 - dist(i, j) / d_max, weight_floor) : 1.0;
                g.weights(i, j) = w;
                g.weights(j, i) = w;
            }
        }
    }
    return g;
}

CommunityGraph gen_community_graph(int n, int P, std::uint64_t seed,
                                   std::optional<double> inter_prob) {
    if (P < 1 || P > n) {
        throw config_error("community graph needs 1 <= P <= n, got P=" + std::to_string(P) +
                           ", n=" + std::to_string(n));
    }
    const double p_inter = inter_prob ? *inter_prob : 1.0 / n;
    if (p_inter < 0.0 || p_inter > 1.0) {
        throw config_error("inter-cluster probability must be in [0,1]");
    }

    // Near-equal contiguous clusters; the n % P leftover nodes go one each
    // to the first clusters.
    CommunityGraph out;
    out.labels.resize(static_cast<std::size_t>(n));
    const int base = n / P;
    const int rem = n % P;
    int node = 0;
    for (int p = 0; p < P; ++p) {
        const int size = base + (p < rem ? 1 : 0);
        for (int s = 0; s < size; ++s) {
            out.labels[static_cast<std::size_t>(node++)] = p;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    out.graph.n = n;
    out.graph.weights = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool edge;
            if (out.labels[static_cast<std::size_t>(i)] == out.labels[static_cast<std::size_t>(j)]) {
                edge = true;
            } else {
                edge = unit(rng) < p_inter;
            }
            if (edge) {
                out.graph.weights(i, j) = 1.0;
                out.graph.weights(j, i) = 1.0;
            }
        }
    }
    return out;
}

Vector sample_gmrf(const SpectralDecomposition& decomp, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index n = decomp.eigenvalues.size();
    Vector x = Vector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = decomp.eigenvalues[i];
        if (lambda > 1e-8) {
            x += (normal(rng) / std::sqrt(lambda)) * decomp.eigenvectors.col(i);
        }
    }
    return x;
}

Vector sample_gmrf(const Laplacian& L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const SpectralDecomposition decomp = eigendecompose(L);
    return sample_gmrf(decomp, rng);
}

DatasetPair gen_multimodal(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);

    const Graph gs = gen_sensor_graph(cfg.n_s, cfg.k, rng());
    const CommunityGraph cm = gen_community_graph(cfg.n_m, cfg.clusters, rng());

    const SpectralDecomposition decomp = eigendecompose(build_laplacian(gs));
    Matrix cluster_signals(cfg.n_s, cfg.clusters);
    for (int p = 0; p < cfg.clusters; ++p) {
        cluster_signals.col(p) = sample_gmrf(decomp, rng);
    }

    DatasetPair pair;
    pair.sigma = cfg.sigma;
    pair.Xstar.resize(cfg.n_s, cfg.n_m);
    for (int j = 0; j < cfg.n_m; ++j) {
        pair.Xstar.col(j) = cluster_signals.col(cm.labels[static_cast<std::size_t>(j)]);
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    pair.Y = pair.Xstar;
    if (cfg.sigma > 0.0) {
        for (Eigen::Index j = 0; j < pair.Y.cols(); ++j) {
            for (Eigen::Index i = 0; i < pair.Y.rows(); ++i) {
                pair.Y(i, j) += cfg.sigma * normal(rng);
            }
        }
    }

    pair.gt_spatial = gs;
    pair.gt_modality = cm.graph;
    return pair;
}

double median_pairwise_distance(const Matrix& X) {
    const int n = static_cast<int>(X.rows());
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(pair_count(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            dists.push_back((X.row(i) - X.row(j)).norm());
        }
    }
    if (dists.empty()) {
        return 1.0;
    }
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
    return dists[mid];
}

Graph rbf_graph(const Matrix& X, double bandwidth, int k) {
    const int n = static_cast<int>(X.rows());
    if (n < 2) {
        throw config_error("rbf graph needs at least 2 rows");
    }
    const double bw = bandwidth > 0.0 ? bandwidth : median_pairwise_distance(X);
    const double denom = 2.0 * bw * bw;

    Matrix sq(n, n);
    for (int i = 0; i < n; ++i) {
        sq(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d2 = (X.row(i) - X.row(j)).squaredNorm();
            sq(i, j) = d2;
            sq(j, i) = d2;
        }
    }

    const int kk = std::min(k, n - 1);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> keep(n, n);
    keep.setConstant(false);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (sq(i, a) != sq(i, b)) return sq(i, a) < sq(i, b);
            return a < b;
        });
        int taken = 0;
        for (int j : order) {
            if (j == i) continue;
            keep(i, j) = true;
            keep(j, i) = true;
            if (++taken == kk) break;
        }
    }

    Graph g;
    g.n = n;
    g.weights = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (keep(i, j)) {
                const double w = denom > 0.0 ? std::exp(-sq(i, j) / denom) : (sq(i, j) == 0.0);
                g.weights(i, j) = w;
                g.weights(j, i) = w;
            }
        }
    }
    return g;
}

}  // namespace twofold::datagen
