#include "support/pgd_oracle.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace twofold::testing {

namespace {

// Squared distances between rows, pairs (i,j) with i<j in row-major order.
Eigen::VectorXd row_sq_dists(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    Eigen::VectorXd d(n * (n - 1) / 2);
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j, ++idx) {
            d[idx] = (X.row(i) - X.row(j)).squaredNorm();
        }
    }
    return d;
}

void degrees(const Eigen::VectorXd& ell, Eigen::Index n, Eigen::VectorXd& deg) {
    deg.setZero();
    Eigen::Index idx = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j, ++idx) {
            deg[i] -= ell[idx];
            deg[j] -= ell[idx];
        }
    }
}

}  // namespace

double oracle_objective(const OracleProblem& prob, const Eigen::VectorXd& ell) {
    const Eigen::Index n = prob.X.rows();
    if ((ell.array() > 0.0).any()) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::VectorXd deg(n);
    degrees(ell, n, deg);
    if ((deg.array() <= 0.0).any()) {
        return std::numeric_limits<double>::infinity();
    }
    const Eigen::VectorXd d2 = row_sq_dists(prob.X);
    // smoothness = sum over pairs of (-ell) * dist^2
    return -prob.alpha * ell.dot(d2) - prob.beta * deg.array().log().sum() +
           prob.gamma * ell.squaredNorm();
}

OracleResult pgd_solve(const OracleProblem& prob, long max_iters) {
    const Eigen::Index n = prob.X.rows();
    const Eigen::Index m = n * (n - 1) / 2;
    const Eigen::VectorXd d2 = row_sq_dists(prob.X);

    Eigen::VectorXd ell = Eigen::VectorXd::Constant(m, -0.1);
    Eigen::VectorXd deg(n), grad(m), cand(m), cand_deg(n);

    auto objective = [&](const Eigen::VectorXd& e, Eigen::VectorXd& dtmp) {
        degrees(e, n, dtmp);
        if ((dtmp.array() <= 0.0).any()) {
            return std::numeric_limits<double>::infinity();
        }
        return -prob.alpha * e.dot(d2) - prob.beta * dtmp.array().log().sum() +
               prob.gamma * e.squaredNorm();
    };

    double f_cur = objective(ell, deg);
    double eta0 = 1.0;
    long stalls = 0;
    OracleResult result;

    for (long k = 0; k < max_iters; ++k) {
        degrees(ell, n, deg);
        Eigen::Index idx = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = i + 1; j < n; ++j, ++idx) {
                grad[idx] = -prob.alpha * d2[idx] + 2.0 * prob.gamma * ell[idx] +
                            prob.beta * (1.0 / deg[i] + 1.0 / deg[j]);
            }
        }

        double eta = eta0 / std::sqrt(static_cast<double>(k + 1));
        bool accepted = false;
        for (int tries = 0; tries < 60; ++tries) {
            cand = (ell - eta * grad).cwiseMin(0.0);
            const double f_cand = objective(cand, cand_deg);
            if (f_cand < f_cur) {
                ell.swap(cand);
                f_cur = f_cand;
                accepted = true;
                break;
            }
            eta *= 0.5;
            eta0 *= 0.75;  // shrink the base so later iterations start lower
        }
        result.iterations = k + 1;
        if (!accepted) {
            if (++stalls >= 50) {
                break;  // no descent direction at double precision
            }
        } else {
            stalls = 0;
        }
    }

    result.ell = ell;
    result.objective = f_cur;
    return result;
}

}  // namespace twofold::testing
