#pragma once

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace accum {

inline Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter = 0) {
    const Eigen::Index n = A.cols();
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * A.cwiseAbs().maxCoeff() *
                       static_cast<double>(std::max(A.rows(), n));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < n; ++i)
            if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
        z.setZero(n);
        if (idx.empty()) return;
        Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
        const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[static_cast<Eigen::Index>(k)];
    };

    Eigen::VectorXd w = A.transpose() * (b - A * x);
    for (int outer = 0; outer < max_iter; ++outer) {
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!passive[static_cast<std::size_t>(i)] && w[i] > best_w) {
                best_w = w[i];
                best = i;
            }
        }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        Eigen::VectorXd z;
        for (int inner = 0; inner <= max_iter; ++inner) {
            solve_passive(z);
            bool feasible = true;
            double alpha = 1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                if (passive[static_cast<std::size_t>(i)] && z[i] <= 0.0) {
                    feasible = false;
                    const double denom = x[i] - z[i];
                    if (denom > 0.0) alpha = std::min(alpha, x[i] / denom);
                }
            }
            if (feasible) break;
            x += alpha * (z - x);
            for (Eigen::Index i = 0; i < n; ++i) {
                if (passive[static_cast<std::size_t>(i)] && x[i] <= tol) {
                    passive[static_cast<std::size_t>(i)] = false;
                    x[i] = 0.0;
                }
            }
        }
        x = z.cwiseMax(0.0);
        w = A.transpose() * (b - A * x);
    }
    return x;
}

}  // namespace accum
