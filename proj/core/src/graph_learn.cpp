#include "twofold/graph_learn.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace twofold::learn {

namespace {

// d = Psi(ell): degree vector, d_i = -(sum of entries of pairs containing i).
void degree_of(const Vector& ell, int n, Vector& d) {
    d.setZero();
    Eigen::Index idx = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++idx) {
            d[i] -= ell[idx];
            d[j] -= ell[idx];
        }
    }
}

}  // namespace

double default_theta(double gamma, int n) {
    return 0.9 / (2.0 * gamma + std::sqrt(2.0 * (n - 1)));
}

Vector prox_nonpositive(const Vector& z) {
    return z.cwiseMin(0.0);
}

double prox_neglog_scalar(double z, double beta, double step) {
    const double bs = beta * step;
    const double root = std::sqrt(z * z + 4.0 * bs);
    // The direct form cancels for z << 0; use the conjugate form there.
    return z >= 0.0 ? 0.5 * (z + root) : 2.0 * bs / (root - z);
}

Vector prox_neglog(const Vector& z, double beta, double step) {
    Vector out(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        out[i] = prox_neglog_scalar(z[i], beta, step);
    }
    return out;
}

double objective_value(const LaplacianVech& ell, const Matrix& X, const LearnParams& p) {
    const double inf = std::numeric_limits<double>::infinity();
    if ((ell.ell.array() > 0.0).any()) {
        return inf;
    }
    const Vector d = vech_degree(ell);
    if ((d.array() <= 0.0).any()) {
        return inf;
    }
    return p.alpha * smoothness_vech(X, ell) - p.beta * d.array().log().sum() +
           p.gamma * ell.ell.squaredNorm();
}

LaplacianVech pds_solve_dists(const Vector& sq_dists, int n, const LearnParams& p,
                              const PdsSettings& s, PdsReport* report, const Vector* init_ell) {
    if (n < 2) {
        throw dimension_error("graph learning needs at least 2 nodes, got " + std::to_string(n));
    }
    if (sq_dists.size() != pair_count(n)) {
        throw dimension_error("distance vector length does not match node count " +
                              std::to_string(n));
    }
    if (!p.valid()) {
        throw config_error("learn parameters must be strictly positive");
    }
    if (!s.valid()) {
        throw config_error("invalid PDS settings");
    }

    const double theta = s.theta ? *s.theta : default_theta(p.gamma, n);
    const Eigen::Index m = pair_count(n);

    // Linear part of grad g2: alpha * (pull-back of vec(XX^T)), whose pair
    // entry is -||X_i - X_j||^2.
    const Vector grad_const = -p.alpha * sq_dists;

    Vector ell = init_ell ? *init_ell : Vector::Constant(m, -0.1);
    Vector b0(n);
    degree_of(ell, n, b0);

    // The iteration below is the e-domain primal-dual loop written with the
    // degree operator and its adjoint fused into two pair sweeps per step:
    //   z   = ell - theta*(grad_const + 2*gamma*ell + Psi^T b0)
    //   z0  = b0 + theta*Psi(ell)
    //   p   = min(z, 0)
    //   p0  = z0 - theta*prox_neglog(z0/theta, beta, 1/theta)
    //   q   = p - theta*(grad_const + 2*gamma*p + Psi^T p0)
    //   q0  = p0 + theta*Psi(p)
    //   ell <- ell - z + q,  b0 <- b0 - z0 + q0
    Vector z(m), prim(m), deg_ell(n), deg_prim(n), p0(n);

    int iter = 0;
    bool converged = false;
    for (; iter < s.i_max; ++iter) {
        deg_ell.setZero();
        deg_prim.setZero();
        double ell_sq = 0.0;
        {
            Eigen::Index idx = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j, ++idx) {
                    const double e = ell[idx];
                    ell_sq += e * e;
                    const double zv =
                        e - theta * (grad_const[idx] + 2.0 * p.gamma * e - (b0[i] + b0[j]));
                    z[idx] = zv;
                    const double pv = zv < 0.0 ? zv : 0.0;
                    prim[idx] = pv;
                    deg_ell[i] -= e;
                    deg_ell[j] -= e;
                    deg_prim[i] -= pv;
                    deg_prim[j] -= pv;
                }
            }
        }

        for (int i = 0; i < n; ++i) {
            const double z0 = b0[i] + theta * deg_ell[i];
            const double p0v = z0 - theta * prox_neglog_scalar(z0 / theta, p.beta, 1.0 / theta);
            p0[i] = p0v;
            b0[i] += p0v - z0 + theta * deg_prim[i];
        }

        double diff_sq = 0.0;
        {
            Eigen::Index idx = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i + 1; j < n; ++j, ++idx) {
                    const double pv = prim[idx];
                    const double qv =
                        pv - theta * (grad_const[idx] + 2.0 * p.gamma * pv - (p0[i] + p0[j]));
                    const double step = qv - z[idx];
                    diff_sq += step * step;
                    ell[idx] += step;
                }
            }
        }

        const double diff = std::sqrt(diff_sq);
        const double base = std::sqrt(ell_sq);
        if (!std::isfinite(diff) || !std::isfinite(base)) {
            throw numeric_error("PDS iterates diverged (non-finite) at iteration " +
                                std::to_string(iter) + " with step theta=" +
                                std::to_string(theta));
        }
        const double change = base > 0.0 ? diff / base : diff;
        if (change < s.epsilon) {
            ++iter;
            converged = true;
            break;
        }
    }

    if (!ell.allFinite() || !b0.allFinite()) {
        throw numeric_error("PDS produced non-finite iterates with step theta=" +
                            std::to_string(theta));
    }
    if (report) {
        report->iterations = iter;
        report->converged = converged;
        report->state = PdsState{ell, b0};
    }

    LaplacianVech out;
    out.n = n;
    out.ell = ell.cwiseMin(0.0);  // final feasibility projection
    return out;
}

LaplacianVech pds_solve(const Matrix& X, const LearnParams& p, const PdsSettings& s,
                        PdsReport* report, const LaplacianVech* init) {
    const int n = static_cast<int>(X.rows());
    if (init && (init->n != n || init->ell.size() != pair_count(n))) {
        throw dimension_error("warm-start vector does not match node count " + std::to_string(n));
    }
    const Vector sq_dists = pairwise_sq_dists(X);
    return pds_solve_dists(sq_dists, n, p, s, report, init ? &init->ell : nullptr);
}

}  // namespace twofold::learn
