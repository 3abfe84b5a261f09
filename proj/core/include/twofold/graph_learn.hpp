#ifndef TWOFOLD_GRAPH_LEARN_HPP
#define TWOFOLD_GRAPH_LEARN_HPP

#include <optional>

#include "twofold/graph.hpp"

namespace twofold::learn {

/// Weights of the per-domain graph-learning objective: smoothness (alpha),
/// node connectivity (beta), edge-weight sparsity (gamma). All > 0.
struct LearnParams {
    double alpha = 0.5;
    double beta = 0.5;
    double gamma = 0.5;

    bool valid() const { return alpha > 0.0 && beta > 0.0 && gamma > 0.0; }
};

/// Primal-dual solver settings. A missing theta selects the default step
/// 0.9 / (2*gamma + sqrt(2*(n-1))), which satisfies the primal-dual
/// step-size condition for this splitting at every gamma > 0.
struct PdsSettings {
    std::optional<double> theta;
    double epsilon = 1e-5;
    int i_max = 10000;

    /// Bounded-cost settings used inside the unrolled forward pass.
    static PdsSettings for_unrolled() { return PdsSettings{std::nullopt, 1e-5, 500}; }

    bool valid() const {
        return (!theta || *theta > 0.0) && epsilon > 0.0 && i_max >= 1;
    }
};

/// Primal/dual iterate pair of the solver.
struct PdsState {
    Vector ell;
    Vector b0;
};

/// Convergence report for one pds_solve call; carries the final
/// primal/dual iterates.
struct PdsReport {
    int iterations = 0;
    bool converged = false;
    PdsState state;
};

/// Default primal-dual step size for an n-node problem.
double default_theta(double gamma, int n);

/// Projection onto the nonpositive orthant, elementwise min(z, 0).
/// Independent of the prox step size and idempotent.
Vector prox_nonpositive(const Vector& z);

/// Proximal operator of -beta * sum(log(.)) with the given step:
/// elementwise (z + sqrt(z^2 + 4*beta*step)) / 2. Strictly positive output.
Vector prox_neglog(const Vector& z, double beta, double step);

/// Scalar form of prox_neglog.
double prox_neglog_scalar(double z, double beta, double step);

/// Graph-learning objective in vech form:
///   alpha * smoothness - beta * sum(log(degrees)) + gamma * ||ell||^2,
/// +infinity when ell has a positive entry or a node has nonpositive degree.
double objective_value(const LaplacianVech& ell, const Matrix& X, const LearnParams& p);

/// Solves the vech-form graph-learning problem for the rows of X by
/// primal-dual splitting. The data enters only through the pairwise
/// squared row distances. Returns the primal iterate after the relative-
/// change stopping rule or i_max iterations, projected onto ell <= 0.
///
/// An optional init overrides the canonical start ell = -1/10 (used for
/// warm starts across unrolled layers). Throws numeric_error when the
/// iterates become non-finite.
LaplacianVech pds_solve(const Matrix& X, const LearnParams& p, const PdsSettings& s,
                        PdsReport* report = nullptr, const LaplacianVech* init = nullptr);

/// Core loop over a precomputed pairwise squared-distance vector.
LaplacianVech pds_solve_dists(const Vector& sq_dists, int n, const LearnParams& p,
                              const PdsSettings& s, PdsReport* report = nullptr,
                              const Vector* init_ell = nullptr);

}  // namespace twofold::learn

#endif  // TWOFOLD_GRAPH_LEARN_HPP
