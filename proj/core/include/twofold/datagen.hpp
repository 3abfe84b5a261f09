#ifndef TWOFOLD_DATAGEN_HPP
#define TWOFOLD_DATAGEN_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "twofold/graph.hpp"

namespace twofold::datagen {

/// Synthetic twofold-dataset configuration.
struct SynthConfig {
    int n_s = 80;        // spatial nodes
    int n_m = 120;       // modality nodes
    int k = 6;           // kNN neighbors for the sensor graph
    int clusters = 8;    // modality communities (P)
    double sigma = 0.1;  // AWGN standard deviation
    std::uint64_t seed = 0;

    void validate() const;
};

/// One training/evaluation pair: noisy observation, ground truth, and the
/// generating graphs when known.
struct DatasetPair {
    Matrix Y;
    Matrix Xstar;
    std::optional<Graph> gt_spatial;
    std::optional<Graph> gt_modality;
    double sigma = 0.0;
};

/// Random sensor graph: n uniform points in the unit square, k-nearest-
/// neighbor edges symmetrized by union, distances affinely rescaled to
/// edge weights in [0,1] (shortest retained edge closest to 1). The
/// longest retained edge is floored at a vanishing positive weight so the
/// rescale never deletes it.
Graph gen_sensor_graph(int n, int k, std::uint64_t seed);

/// Community (planted-partition) graph: near-equal clusters, complete
/// inside each cluster, inter-cluster pairs present independently with
/// probability 1/n, all weights 1. inter_prob overrides the default 1/n.
struct CommunityGraph {
    Graph graph;
    std::vector<int> labels;
};
CommunityGraph gen_community_graph(int n, int P, std::uint64_t seed,
                                   std::optional<double> inter_prob = std::nullopt);

/// Zero-mean Gaussian sample with covariance pinv(L): standard normal
/// coordinates on the non-null eigenpairs scaled by 1/sqrt(lambda), zero
/// along the nullspace.
Vector sample_gmrf(const Laplacian& L, std::uint64_t seed);
Vector sample_gmrf(const SpectralDecomposition& decomp, std::mt19937_64& rng);

/// Full synthetic pair: sensor + community graphs, P independent GMRF
/// spatial signals assigned piecewise-constant along modality clusters,
/// AWGN with std sigma.
DatasetPair gen_multimodal(const SynthConfig& cfg);

/// Gaussian RBF similarity graph on the rows of X, sparsified to k
/// nearest neighbors and symmetrized by union. A nonpositive bandwidth
/// selects the median pairwise row distance.
Graph rbf_graph(const Matrix& X, double bandwidth, int k);

/// Median Euclidean distance between distinct rows of X.
double median_pairwise_distance(const Matrix& X);

}  // namespace twofold::datagen

#endif  // TWOFOLD_DATAGEN_HPP
