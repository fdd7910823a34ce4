#pragma once

// Nonparametric MLE of the mixing distribution Q of a zero-truncated Poisson
// mixture, maximizing sum_j n_j ln f_Q(j) over all finitely supported Q.
//
// The solver alternates
//   1. support expansion: add every positive local maximum of the gradient
//      function D(gamma; Q) found on a grid (each refined by zooming),
//   2. a constrained Newton weight update (quadratic model solved by NNLS,
//      then a backtracking line search keeping the likelihood monotone),
//   3. pruning of negligible weights, moving each support point toward the
//      nearest local maximum of D, and merging points that coincide.
// It stops once sup_gamma D(gamma; Q) <= tol, which characterizes the NPMLE.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "accum/freq_data.hpp"
#include "accum/mixture.hpp"
#include "accum/nnls.hpp"
#include "accum/numerics.hpp"

namespace accum {

struct SolverOptions {
    double tol = 1e-6;              ///< convergence bound on sup D(gamma; Q)
    int max_iter = 500;
    int grid_size = 1000;           ///< geometric grid points on [gamma_min, 2 d]
    double gamma_min = 1e-3;
    double weight_floor = 1e-8;
    double merge_eps = 1e-4;        ///< relative gap below which neighbours merge
    double cluster_eps = 1e-2;      ///< relative gap for post-convergence consolidation
    int zoom_rounds = 3;
    int max_initial_support = 15;
    std::optional<std::uint64_t> init_seed;  ///< random initial support when set
};

struct NpmleFit {
    MixingDistribution q_hat;
    double loglik = kNegInf;
    double gradient_sup = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Working log-likelihood after each iteration.
    std::vector<double> loglik_trace;
};

/// Raised by callers that require a converged fit.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when the data carry a single distinct frequency; the likelihood
/// supremum then sits on the boundary. The degenerate fit is attached.
class BoundaryFitError : public std::runtime_error {
public:
    BoundaryFitError(const std::string& what, NpmleFit fit) : std::runtime_error(what), fit_(std::move(fit)) {}
    const NpmleFit& fit() const noexcept { return fit_; }

private:
    NpmleFit fit_;
};

/// sum_{j observed} n_j ln f_Q(j), the multinomial constant omitted.
inline double conditional_loglik(const MixingDistribution& q, const FrequencyCounts& fc) {
    CompensatedSum acc;
    for (const auto& [j, n] : fc.counts()) {
        const double lf = log_truncated_poisson_mixture_pmf(q, j);
        if (lf == kNegInf) return kNegInf;
        acc.add(static_cast<double>(n) * lf);
    }
    return acc.value();
}

/// Directional derivative of the normalized log-likelihood from Q toward
/// the point mass at gamma: sum_j (n_j / n_plus) f_gamma(j) / f_Q(j) - 1.
inline double gradient(const MixingDistribution& q, const FrequencyCounts& fc, double gamma) {
    const double np = static_cast<double>(fc.n_plus());
    double s = 0.0;
    for (const auto& [j, n] : fc.counts()) {
        const double lfq = log_truncated_poisson_mixture_pmf(q, j);
        s += static_cast<double>(n) / np * std::exp(log_ztp_pmf(j, gamma, gamma == 0.0) - lfq);
    }
    return s - 1.0;
}

namespace detail {

/// Solver workspace over the distinct observed frequencies.
class NpmleProblem {
public:
    explicit NpmleProblem(const FrequencyCounts& fc) {
        for (const auto& [j, n] : fc.counts()) {
            x_.push_back(j);
            n_.push_back(static_cast<double>(n));
        }
        n_plus_ = static_cast<double>(fc.n_plus());
    }

    std::size_t rows() const { return x_.size(); }
    std::int64_t max_x() const { return x_.back(); }
    const std::vector<std::int64_t>& x() const { return x_; }

    /// ln f_gamma(x_k) for every observed frequency.
    std::vector<double> log_component(double gamma) const {
        std::vector<double> out(x_.size());
        for (std::size_t k = 0; k < x_.size(); ++k) out[k] = log_ztp_pmf(x_[k], gamma, gamma == 0.0);
        return out;
    }

    std::vector<double> log_density(const std::vector<double>& s, const std::vector<double>& w) const {
        std::vector<double> out(x_.size(), kNegInf);
        for (std::size_t u = 0; u < s.size(); ++u) {
            if (w[u] <= 0.0) continue;
            const auto lc = log_component(s[u]);
            const double lw = std::log(w[u]);
            for (std::size_t k = 0; k < x_.size(); ++k) out[k] = log_add_exp(out[k], lw + lc[k]);
        }
        return out;
    }

    double loglik(const std::vector<double>& s, const std::vector<double>& w) const {
        const auto lf = log_density(s, w);
        CompensatedSum acc;
        for (std::size_t k = 0; k < x_.size(); ++k) {
            if (lf[k] == kNegInf) return kNegInf;
            acc.add(n_[k] * lf[k]);
        }
        return acc.value();
    }

    double gradient(double gamma, const std::vector<double>& log_f) const {
        const auto lc = log_component(gamma);
        double s = 0.0;
        for (std::size_t k = 0; k < x_.size(); ++k) s += n_[k] / n_plus_ * std::exp(lc[k] - log_f[k]);
        return s - 1.0;
    }

    /// Constrained Newton direction: minimize sum_k (n_k/n_plus) (S p - 2)_k^2
    /// over the simplex, with S_ku = f_u(x_k) / f_Q(x_k).
    std::vector<double> newton_weights(const std::vector<double>& s, const std::vector<double>& log_f) const {
        const auto K = static_cast<Eigen::Index>(x_.size());
        const auto U = static_cast<Eigen::Index>(s.size());
        constexpr double kSumRow = 1e3;
        Eigen::MatrixXd A(K + 1, U);
        Eigen::VectorXd b(K + 1);
        for (Eigen::Index k = 0; k < K; ++k) {
            const double r = std::sqrt(n_[static_cast<std::size_t>(k)] / n_plus_);
            b[k] = 2.0 * r;
        }
        for (Eigen::Index u = 0; u < U; ++u) {
            const auto lc = log_component(s[static_cast<std::size_t>(u)]);
            for (Eigen::Index k = 0; k < K; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                A(k, u) = std::sqrt(n_[kk] / n_plus_) * std::exp(lc[kk] - log_f[kk]);
            }
            A(K, u) = kSumRow;
        }
        b[K] = kSumRow;
        const Eigen::VectorXd p = nnls(A, b);
        std::vector<double> out(s.size());
        const double total = p.sum();
        for (std::size_t u = 0; u < s.size(); ++u) out[u] = total > 0.0 ? p[static_cast<Eigen::Index>(u)] / total : 0.0;
        return out;
    }

    /// One damped Newton step on all weights and positive support points
    /// jointly, with sum(w) = 1 imposed through the KKT system. Returns
    /// false when no likelihood increase was found.
    bool newton_polish(std::vector<double>& s, std::vector<double>& w) const;

private:
    std::vector<std::int64_t> x_;
    std::vector<double> n_;
    double n_plus_ = 0.0;
};

inline bool NpmleProblem::newton_polish(std::vector<double>& s, std::vector<double>& w) const {
    const std::size_t K = x_.size();
    const std::size_t U = s.size();
    if (U == 0) return false;
    std::vector<std::size_t> free_gamma;  // atoms whose position is a variable
    for (std::size_t u = 0; u < U; ++u)
        if (s[u] > 0.0) free_gamma.push_back(u);
    const std::size_t G = free_gamma.size();
    const auto P = static_cast<Eigen::Index>(U + G);

    const auto log_f = log_density(s, w);
    // r[u][k] = c_u(x_k) / f(x_k); a = d ln c / d gamma; ap = d a / d gamma.
    std::vector<std::vector<double>> r(U, std::vector<double>(K)), a(U, std::vector<double>(K, 0.0)),
        ap(U, std::vector<double>(K, 0.0));
    for (std::size_t u = 0; u < U; ++u) {
        const auto lc = log_component(s[u]);
        const double g = s[u];
        const double inv_one_minus = g > 0.0 ? 1.0 / -std::expm1(-g) : 0.0;
        const double sh = g > 0.0 ? 2.0 * std::sinh(0.5 * g) : 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            r[u][k] = std::exp(lc[k] - log_f[k]);
            if (g > 0.0) {
                const double xk = static_cast<double>(x_[k]);
                a[u][k] = xk / g - inv_one_minus;
                ap[u][k] = -xk / (g * g) + 1.0 / (sh * sh);
            }
        }
    }

    Eigen::VectorXd grad = Eigen::VectorXd::Zero(P);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(P, P);
    for (std::size_t k = 0; k < K; ++k) {
        const double nk = n_[k];
        Eigen::VectorXd dv(P);  // first derivative of f(x_k) / f(x_k) per variable
        for (std::size_t u = 0; u < U; ++u) dv[static_cast<Eigen::Index>(u)] = r[u][k];
        for (std::size_t i = 0; i < G; ++i) {
            const auto u = free_gamma[i];
            dv[static_cast<Eigen::Index>(U + i)] = w[u] * r[u][k] * a[u][k];
        }
        grad += nk * dv;
        hess -= nk * dv * dv.transpose();
        for (std::size_t i = 0; i < G; ++i) {
            const auto u = free_gamma[i];
            const auto gi = static_cast<Eigen::Index>(U + i);
            const auto wi = static_cast<Eigen::Index>(u);
            const double cross = nk * r[u][k] * a[u][k];
            hess(wi, gi) += cross;
            hess(gi, wi) += cross;
            hess(gi, gi) += nk * w[u] * r[u][k] * (a[u][k] * a[u][k] + ap[u][k]);
        }
    }

    const double scale = std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1.0);
    Eigen::VectorXd step;
    bool found = false;
    for (double mu : {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0}) {
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(P + 1, P + 1);
        kkt.topLeftCorner(P, P) = hess - mu * scale * Eigen::MatrixXd::Identity(P, P);
        for (std::size_t u = 0; u < U; ++u) {
            kkt(P, static_cast<Eigen::Index>(u)) = 1.0;
            kkt(static_cast<Eigen::Index>(u), P) = 1.0;
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(P + 1);
        rhs.head(P) = -grad;
        const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
        if (!sol.allFinite()) continue;
        step = sol.head(P);
        const double gain = grad.dot(step);
        const double model = gain + 0.5 * step.dot(hess * step);
        if (gain > 0.0 && model > 0.0) {
            found = true;
            break;
        }
    }
    if (!found) return false;

    // Largest step keeping weights nonnegative, positions positive and ordered.
    double alpha = 1.0;
    for (std::size_t u = 0; u < U; ++u) {
        const double dw = step[static_cast<Eigen::Index>(u)];
        if (dw < 0.0) alpha = std::min(alpha, -w[u] / dw);
    }
    std::vector<double> dg(U, 0.0);
    for (std::size_t i = 0; i < G; ++i) dg[free_gamma[i]] = step[static_cast<Eigen::Index>(U + i)];
    for (std::size_t u = 0; u < U; ++u) {
        if (dg[u] < 0.0 && s[u] > 0.0) alpha = std::min(alpha, -0.5 * s[u] / dg[u]);
        if (u + 1 < U && dg[u] > dg[u + 1]) alpha = std::min(alpha, 0.5 * (s[u + 1] - s[u]) / (dg[u] - dg[u + 1]));
    }

    const double base = loglik(s, w);
    std::vector<double> s_new(U), w_new(U);
    for (int k = 0; k < 40; ++k, alpha *= 0.5) {
        double total = 0.0;
        for (std::size_t u = 0; u < U; ++u) {
            w_new[u] = std::max(0.0, w[u] + alpha * step[static_cast<Eigen::Index>(u)]);
            s_new[u] = s[u] + alpha * dg[u];
            total += w_new[u];
        }
        for (auto& v : w_new) v /= total;
        if (loglik(s_new, w_new) > base) {
            s = s_new;
            w = w_new;
            return true;
        }
    }
    return false;
}

/// Zooms into [lo, hi] to locate the maximizer of D; returns (gamma, D).
inline std::pair<double, double> zoom_maximum(const NpmleProblem& prob, const std::vector<double>& log_f, double lo,
                                              double hi, int rounds) {
    constexpr int kPoints = 21;
    double best_g = lo, best_d = kNegInf;
    for (int r = 0; r <= rounds; ++r) {
        int best_i = 0;
        best_d = kNegInf;
        const double step = (hi - lo) / (kPoints - 1);
        for (int i = 0; i < kPoints; ++i) {
            const double g = lo + step * i;
            const double d = prob.gradient(g, log_f);
            if (d > best_d) {
                best_d = d;
                best_i = i;
                best_g = g;
            }
        }
        const double nlo = lo + step * std::max(best_i - 1, 0);
        const double nhi = lo + step * std::min(best_i + 1, kPoints - 1);
        lo = nlo;
        hi = nhi;
    }
    return {best_g, best_d};
}

struct GridScan {
    std::vector<double> candidates;
    double sup = kNegInf;
    double argsup = 0.0;
};

/// Evaluates D on the grid, refines every local maximum, and reports the
/// refined maxima whose D exceeds `threshold`.
inline GridScan scan_gradient(const NpmleProblem& prob, const std::vector<double>& log_f,
                              const std::vector<double>& grid, int rounds, double threshold) {
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) d[i] = prob.gradient(grid[i], log_f);
    GridScan out;
    auto record = [&out](double g, double v) {
        if (v > out.sup) {
            out.sup = v;
            out.argsup = g;
        }
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        record(grid[i], d[i]);
        const bool left_ok = i == 0 || d[i] >= d[i - 1];
        const bool right_ok = i + 1 == grid.size() || d[i] > d[i + 1];
        if (!(left_ok && right_ok)) continue;
        double g = grid[i], dv = d[i];
        if (i > 0 || grid[0] > 0.0) {
            const double lo = grid[i > 0 ? i - 1 : 0];
            const double hi = grid[std::min(i + 1, grid.size() - 1)];
            auto [rg, rd] = zoom_maximum(prob, log_f, lo, hi, rounds);
            if (rd > dv) {
                g = rg;
                dv = rd;
            }
        }
        record(g, dv);
        if (dv > threshold) out.candidates.push_back(g);
    }
    return out;
}

inline std::vector<double> make_grid(double gamma_min, double gamma_max, int size) {
    std::vector<double> grid{0.0};
    const double ratio = std::log(gamma_max / gamma_min) / std::max(size - 1, 1);
    for (int i = 0; i < size; ++i) grid.push_back(gamma_min * std::exp(ratio * i));
    return grid;
}

/// Largest gamma with gamma / (1 - e^{-gamma}) = j, the single-point
/// maximizer of the zero-truncated Poisson likelihood at frequency j >= 2.
inline double ztp_mean_inverse(double mean) {
    double lo = 0.0, hi = mean;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double m = mid / -std::expm1(-mid);
        (m < mean ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline NpmleFit fit_npmle(const FrequencyCounts& fc, const SolverOptions& opts = {}) {
    detail::NpmleProblem prob(fc);

    if (fc.distinct_frequencies() == 1) {
        const auto j = fc.max_frequency();
        NpmleFit fit;
        fit.q_hat = MixingDistribution::point_mass(j == 1 ? 0.0 : detail::ztp_mean_inverse(static_cast<double>(j)));
        fit.loglik = conditional_loglik(fit.q_hat, fc);
        fit.gradient_sup = 0.0;
        fit.converged = true;
        fit.loglik_trace = {fit.loglik};
        const auto what = "single distinct frequency " + std::to_string(j) +
                          ": NPMLE is the boundary point mass at gamma = " + std::to_string(fit.q_hat.gamma(0));
        throw BoundaryFitError(what, std::move(fit));
    }

    const double gamma_max = 2.0 * static_cast<double>(prob.max_x());
    const auto grid = detail::make_grid(opts.gamma_min, gamma_max, opts.grid_size);

    // Initial support: quantiles of the distinct observed frequencies, or a
    // random log-uniform draw when a seed is supplied.
    std::vector<double> s, w;
    const auto& xs = prob.x();
    const std::size_t nu0 = std::min<std::size_t>(xs.size(), static_cast<std::size_t>(opts.max_initial_support));
    if (opts.init_seed) {
        std::mt19937_64 rng(*opts.init_seed);
        std::uniform_real_distribution<double> unif(std::log(0.1), std::log(gamma_max));
        std::exponential_distribution<double> expo(1.0);
        for (std::size_t u = 0; u < nu0; ++u) s.push_back(std::exp(unif(rng)));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (std::size_t u = 0; u < s.size(); ++u) w.push_back(expo(rng));
    } else {
        for (std::size_t u = 0; u < nu0; ++u) {
            const double pos = nu0 == 1 ? 0.0 : static_cast<double>(u) * static_cast<double>(xs.size() - 1) /
                                                    static_cast<double>(nu0 - 1);
            const auto lo = static_cast<std::size_t>(std::floor(pos));
            const auto hi = std::min(lo + 1, xs.size() - 1);
            const double frac = pos - static_cast<double>(lo);
            const double g = static_cast<double>(xs[lo]) * (1.0 - frac) + static_cast<double>(xs[hi]) * frac;
            if (s.empty() || g > s.back()) s.push_back(g);
        }
        w.assign(s.size(), 1.0);
    }
    {
        double total = 0.0;
        for (double v : w) total += v;
        for (double& v : w) v /= total;
    }

    NpmleFit fit;
    double ll = prob.loglik(s, w);
    auto log_f = prob.log_density(s, w);
    fit.loglik_trace.push_back(ll);

    // Removes atoms and merges neighbours unless the likelihood drops by
    // more than 1e-8.
    auto prune_and_merge = [&](std::vector<double>& sup, std::vector<double>& wt) {
        constexpr double kMaxDrop = 1e-8;
        const double entry = prob.loglik(sup, wt);
        for (std::size_t u = 0; u < sup.size() && sup.size() > 1;) {
            if (wt[u] >= opts.weight_floor) {
                ++u;
                continue;
            }
            auto s2 = sup, w2 = wt;
            s2.erase(s2.begin() + static_cast<std::ptrdiff_t>(u));
            const double removed = w2[u];
            w2.erase(w2.begin() + static_cast<std::ptrdiff_t>(u));
            for (double& v : w2) v /= (1.0 - removed);
            const double l2 = prob.loglik(s2, w2);
            if (l2 >= entry - kMaxDrop) {
                sup = std::move(s2);
                wt = std::move(w2);
            } else {
                ++u;
            }
        }
        for (std::size_t u = 0; u + 1 < sup.size();) {
            if (sup[u + 1] - sup[u] > opts.merge_eps * sup[u + 1]) {
                ++u;
                continue;
            }
            auto s2 = sup, w2 = wt;
            const double ww = w2[u] + w2[u + 1];
            s2[u] = ww > 0.0 ? (w2[u] * s2[u] + w2[u + 1] * s2[u + 1]) / ww : s2[u];
            w2[u] = ww;
            s2.erase(s2.begin() + static_cast<std::ptrdiff_t>(u) + 1);
            w2.erase(w2.begin() + static_cast<std::ptrdiff_t>(u) + 1);
            const double l2 = prob.loglik(s2, w2);
            if (l2 >= entry - kMaxDrop) {
                sup = std::move(s2);
                wt = std::move(w2);
            } else {
                ++u;
            }
        }
    };

    // Once optimal, tries to fuse neighbouring atoms closer than cluster_eps
    // (relative) into one and re-polish. A fusion is kept only if the
    // likelihood drops by at most 1e-8 and the result is still optimal.
    auto consolidate = [&]() {
        for (std::size_t u = 0; u + 1 < s.size(); ++u) {
            if (s[u + 1] - s[u] > opts.cluster_eps * s[u + 1]) continue;
            auto s2 = s, w2 = w;
            const double ww = w2[u] + w2[u + 1];
            s2[u] = (w2[u] * s2[u] + w2[u + 1] * s2[u + 1]) / ww;
            w2[u] = ww;
            s2.erase(s2.begin() + static_cast<std::ptrdiff_t>(u) + 1);
            w2.erase(w2.begin() + static_cast<std::ptrdiff_t>(u) + 1);
            for (int k = 0; k < 20; ++k)
                if (!prob.newton_polish(s2, w2)) break;
            const double l2 = prob.loglik(s2, w2);
            if (l2 < ll - 1e-8) continue;
            const auto lf2 = prob.log_density(s2, w2);
            if (detail::scan_gradient(prob, lf2, grid, opts.zoom_rounds, 0.0).sup > opts.tol) continue;
            s = std::move(s2);
            w = std::move(w2);
            ll = l2;
            log_f = lf2;
            fit.loglik_trace.push_back(ll);
            return true;
        }
        return false;
    };

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const auto scan = detail::scan_gradient(prob, log_f, grid, opts.zoom_rounds, 0.0);
        fit.gradient_sup = scan.sup;
        if (scan.sup <= opts.tol) {
            if (consolidate()) continue;
            fit.converged = true;
            break;
        }

        // Expand the support.
        std::vector<double> s2 = s, w2 = w;
        for (double g : scan.candidates) {
            auto it = std::lower_bound(s2.begin(), s2.end(), g);
            if (it != s2.end() && *it == g) continue;
            const auto pos = it - s2.begin();
            s2.insert(it, g);
            w2.insert(w2.begin() + pos, 0.0);
        }

        // Constrained Newton step on the weights with backtracking.
        const auto target = prob.newton_weights(s2, log_f);
        double step = 1.0;
        std::vector<double> trial(w2.size());
        double ll_new = kNegInf;
        for (int k = 0; k < 60; ++k, step *= 0.5) {
            for (std::size_t u = 0; u < w2.size(); ++u) trial[u] = w2[u] + step * (target[u] - w2[u]);
            ll_new = prob.loglik(s2, trial);
            if (ll_new >= ll) break;
        }
        if (ll_new >= ll) w2 = trial;

        // Vertex-direction step: exact line search toward the point mass at
        // the largest gradient maximum. The likelihood is concave along it.
        if (auto it = std::find(s2.begin(), s2.end(), scan.argsup); it != s2.end()) {
            const auto v = static_cast<std::size_t>(it - s2.begin());
            auto along = [&](double alpha) {
                auto wa = w2;
                for (auto& x : wa) x *= (1.0 - alpha);
                wa[v] += alpha;
                return prob.loglik(s2, wa);
            };
            double lo = 0.0, hi = 1.0 - 1e-12;
            constexpr double kPhi = 0.6180339887498949;
            double a1 = hi - kPhi * (hi - lo), a2 = lo + kPhi * (hi - lo);
            double f1 = along(a1), f2 = along(a2);
            for (int k = 0; k < 60; ++k) {
                if (f1 < f2) {
                    lo = a1;
                    a1 = a2;
                    f1 = f2;
                    a2 = lo + kPhi * (hi - lo);
                    f2 = along(a2);
                } else {
                    hi = a2;
                    a2 = a1;
                    f2 = f1;
                    a1 = hi - kPhi * (hi - lo);
                    f1 = along(a1);
                }
            }
            const double best = f1 > f2 ? a1 : a2;
            if (along(best) > prob.loglik(s2, w2)) {
                for (auto& x : w2) x *= (1.0 - best);
                w2[v] += best;
            }
        }

        prune_and_merge(s2, w2);

        for (int k = 0; k < 3; ++k)
            if (!prob.newton_polish(s2, w2)) break;
        prune_and_merge(s2, w2);

        s = std::move(s2);
        w = std::move(w2);
        ll = prob.loglik(s, w);
        log_f = prob.log_density(s, w);
        fit.loglik_trace.push_back(ll);
    }
    if (!fit.converged) {
        fit.gradient_sup = detail::scan_gradient(prob, log_f, grid, opts.zoom_rounds, 0.0).sup;
        fit.converged = fit.gradient_sup <= opts.tol;
    }

    std::vector<MixingDistribution::Atom> atoms;
    for (std::size_t u = 0; u < s.size(); ++u)
        if (w[u] > 0.0) atoms.push_back({s[u], w[u]});
    fit.q_hat = MixingDistribution::normalized(std::move(atoms));
    fit.loglik = ll;
    fit.iterations = iter;
    return fit;
}

}  // namespace accum
