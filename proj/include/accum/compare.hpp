#pragma once

// Agreement diagnostics between the Good-Toulmin curve, the likelihood
// curve and exact rarefaction over the observed range t in [0, 1].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "accum/curves.hpp"
#include "accum/freq_data.hpp"
#include "accum/good_toulmin.hpp"
#include "accum/npmle.hpp"
#include "accum/rarefaction.hpp"

namespace accum {

struct Diagnostics {
    int j_max = 0;
    double step = 0.001;
    /// delta[j - 1] = max_h |phi~_j(h / a) - m_bar_j(h)|.
    std::vector<double> delta;
    /// dee[j - 1] = max_t |phi~_j(t) - phi^_j(t)|.
    std::vector<double> dee;
    double gap_plus = 0.0;
    double gap_chao = 0.0;
};

namespace detail {
inline std::vector<double> unit_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
    const auto n = static_cast<long>(std::ceil(1.0 / step - 1e-9));
    std::vector<double> t;
    for (long i = 1; i <= n; ++i) t.push_back(std::min(1.0, static_cast<double>(i) * step));
    return t;
}
}  // namespace detail

inline double max_gap_phi(const NpmleFit& fit, const FrequencyCounts& fc, std::int64_t j, double step = 0.001) {
    detail::require_converged(fit);
    double worst = 0.0;
    for (double t : detail::unit_grid(step))
        worst = std::max(worst, std::abs(gt_phi(fc, j, t) - lik_phi(fit.q_hat, fc.n_plus(), j, t)));
    return worst;
}

inline double max_gap_phi_plus(const NpmleFit& fit, const FrequencyCounts& fc, double step = 0.001) {
    detail::require_converged(fit);
    double worst = 0.0;
    for (double t : detail::unit_grid(step))
        worst = std::max(worst, std::abs(gt_phi_plus(fc, t) - lik_phi_plus(fit.q_hat, fc.n_plus(), t)));
    return worst;
}

inline double gt_chao(const FrequencyCounts& fc, double t) {
    return chao_functional(gt_phi(fc, 1, t), gt_phi(fc, 2, t), gt_phi_plus(fc, t)).value;
}

inline double max_gap_chao(const NpmleFit& fit, const FrequencyCounts& fc, double step = 0.001) {
    detail::require_converged(fit);
    double worst = 0.0;
    for (double t : detail::unit_grid(step))
        worst = std::max(worst, std::abs(gt_chao(fc, t) - lik_chao(fit.q_hat, fc.n_plus(), t).value));
    return worst;
}

inline Diagnostics compare_estimates(const NpmleFit& fit, const FrequencyCounts& fc, int j_max = 10,
                                     double step = 0.001) {
    Diagnostics d;
    d.j_max = j_max;
    d.step = step;
    for (int j = 1; j <= j_max; ++j) {
        d.delta.push_back(gt_rarefaction_gap(fc, j));
        d.dee.push_back(max_gap_phi(fit, fc, j, step));
    }
    d.gap_plus = max_gap_phi_plus(fit, fc, step);
    d.gap_chao = max_gap_chao(fit, fc, step);
    return d;
}

}  // namespace accum
