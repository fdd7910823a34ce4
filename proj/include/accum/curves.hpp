#pragma once

// Likelihood-based curve estimates phi^_j(t) = n_plus * theta_j(t, Q^).
//
// Unlike Good-Toulmin these are nonnegative for every t. When the smallest
// fitted rate is zero, phi^_1 grows linearly in t, phi^_j -> 0 for j >= 2,
// and the Chao functional grows like exp(gamma_beta t).

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "accum/curve_estimate.hpp"
#include "accum/freq_data.hpp"
#include "accum/mixture.hpp"
#include "accum/npmle.hpp"

namespace accum {

namespace detail {
inline void require_converged(const NpmleFit& fit) {
    if (!fit.converged) throw std::logic_error("curve estimate requested from an unconverged NPMLE fit");
}
}  // namespace detail

inline double lik_phi(const MixingDistribution& q, std::int64_t n_plus, std::int64_t j, double t) {
    return static_cast<double>(n_plus) * theta_j(q, j, t);
}

inline double lik_phi(const NpmleFit& fit, const FrequencyCounts& fc, std::int64_t j, double t) {
    detail::require_converged(fit);
    return lik_phi(fit.q_hat, fc.n_plus(), j, t);
}

inline double lik_phi_plus(const MixingDistribution& q, std::int64_t n_plus, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("lik_phi_plus needs t > 0");
    return static_cast<double>(n_plus) * theta_plus(q, t);
}

inline double lik_phi_plus(const NpmleFit& fit, const FrequencyCounts& fc, double t) {
    detail::require_converged(fit);
    return lik_phi_plus(fit.q_hat, fc.n_plus(), t);
}

/// G_c(phi^(t)).
inline ChaoValue lik_chao(const MixingDistribution& q, std::int64_t n_plus, double t) {
    return chao_functional(lik_phi(q, n_plus, 1, t), lik_phi(q, n_plus, 2, t), lik_phi_plus(q, n_plus, t));
}

inline CurveEstimate lik_curve(const NpmleFit& fit, const FrequencyCounts& fc, const std::vector<double>& t_grid,
                               int j_max = 0) {
    detail::require_converged(fit);
    CurveEstimate c;
    c.estimator = Estimator::likelihood;
    c.t_grid = t_grid;
    c.j_max = j_max > 0 ? j_max : static_cast<int>(fc.max_frequency());
    auto& chao = c.functionals["chao"];
    for (double t : t_grid) {
        std::vector<double> row(static_cast<std::size_t>(c.j_max));
        for (int j = 1; j <= c.j_max; ++j) row[static_cast<std::size_t>(j - 1)] = lik_phi(fit.q_hat, fc.n_plus(), j, t);
        chao.push_back(lik_chao(fit.q_hat, fc.n_plus(), t).value);
        c.phi_plus.push_back(lik_phi_plus(fit.q_hat, fc.n_plus(), t));
        c.phi.push_back(std::move(row));
        c.admissible.push_back(true);
    }
    return c;
}

struct ChaoGrowth {
    double beta_gamma = 0.0;
    double constant = 0.0;
};

/// For a fit with a zero support point, the limit of
/// G_c(phi^(t)) / exp(gamma_beta t) as t -> infinity, gamma_beta being the
/// smallest positive support point: n_plus w_1^2 (1 - e^{-g_b}) / (w_b g_b^2).
/// Empty otherwise.
inline std::optional<ChaoGrowth> chao_growth_constant(const MixingDistribution& q, std::int64_t n_plus) {
    if (!q.has_zero_support() || q.size() < 2) return std::nullopt;
    const double w1 = q.weight(0);
    const double wb = q.weight(1);
    const double gb = q.gamma(1);
    ChaoGrowth g;
    g.beta_gamma = gb;
    g.constant = static_cast<double>(n_plus) * w1 * w1 * -std::expm1(-gb) / (wb * gb * gb);
    return g;
}

inline std::optional<ChaoGrowth> chao_growth_constant(const NpmleFit& fit, const FrequencyCounts& fc) {
    detail::require_converged(fit);
    return chao_growth_constant(fit.q_hat, fc.n_plus());
}

}  // namespace accum
