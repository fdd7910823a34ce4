#pragma once

// Good-Toulmin estimator: phi~_j(t) = sum_{b >= j} C(b, j) t^j (1 - t)^(b - j) n_b.
//
// Exact at t = 1 and a nonnegative interpolation for t <= 1. Past t = 1 the
// series alternates and, beyond t = 2, diverges with the sign of
// (-1)^(d - j). Terms are kept as signed log magnitudes and summed largest
// first with compensation.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "accum/curve_estimate.hpp"
#include "accum/freq_data.hpp"
#include "accum/numerics.hpp"

namespace accum {

inline double gt_phi(const FrequencyCounts& fc, std::int64_t j, double t) {
    if (j < 1) throw std::invalid_argument("gt_phi needs j >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("gt_phi needs t > 0");
    if (t == 1.0) return static_cast<double>(fc[j]);
    const double one_minus = 1.0 - t;
    const double log_abs_one_minus = one_minus == 0.0 ? kNegInf : std::log(std::abs(one_minus));
    const double log_t = std::log(t);
    std::vector<SignedLog> terms;
    for (auto it = fc.counts().lower_bound(j); it != fc.counts().end(); ++it) {
        const auto [b, n] = *it;
        const auto k = b - j;
        SignedLog term;
        if (k == 0) {
            term.log_magnitude = static_cast<double>(j) * log_t + std::log(static_cast<double>(n));
            term.sign = 1;
        } else if (one_minus != 0.0) {
            term.log_magnitude = log_binomial(b, j) + static_cast<double>(j) * log_t +
                                 static_cast<double>(k) * log_abs_one_minus + std::log(static_cast<double>(n));
            term.sign = (one_minus < 0.0 && k % 2 == 1) ? -1 : 1;
        }
        terms.push_back(term);
    }
    return sum_signed_terms(std::move(terms));
}

/// phi~_+(t) = sum_x n_x [1 - (1 - t)^x].
inline double gt_phi_plus(const FrequencyCounts& fc, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("gt_phi_plus needs t > 0");
    if (t <= 1.0) {
        CompensatedSum acc;
        const double l = std::log1p(-t);
        for (const auto& [x, n] : fc.counts())
            acc.add(static_cast<double>(n) * (t == 1.0 ? 1.0 : -std::expm1(static_cast<double>(x) * l)));
        return acc.value();
    }
    std::vector<SignedLog> terms;
    terms.push_back({std::log(static_cast<double>(fc.n_plus())), 1});
    const double l = std::log(t - 1.0);
    for (const auto& [x, n] : fc.counts()) {
        // -(1 - t)^x = -(-1)^x (t - 1)^x
        terms.push_back({static_cast<double>(x) * l + std::log(static_cast<double>(n)), x % 2 == 0 ? -1 : 1});
    }
    return sum_signed_terms(std::move(terms));
}

/// Good-Toulmin curve over a grid. `j_max` <= 0 selects d.
inline CurveEstimate gt_curve(const FrequencyCounts& fc, const std::vector<double>& t_grid, int j_max = 0) {
    CurveEstimate c;
    c.estimator = Estimator::good_toulmin;
    c.t_grid = t_grid;
    c.j_max = j_max > 0 ? j_max : static_cast<int>(fc.max_frequency());
    auto& chao = c.functionals["chao"];
    for (double t : t_grid) {
        std::vector<double> row(static_cast<std::size_t>(c.j_max));
        bool ok = true;
        for (int j = 1; j <= c.j_max; ++j) {
            row[static_cast<std::size_t>(j - 1)] = gt_phi(fc, j, t);
            ok = ok && row[static_cast<std::size_t>(j - 1)] >= 0.0;
        }
        const double plus = gt_phi_plus(fc, t);
        const double p2 = c.j_max >= 2 ? row[1] : gt_phi(fc, 2, t);
        chao.push_back(chao_functional(row[0], p2, plus).value);
        c.phi.push_back(std::move(row));
        c.phi_plus.push_back(plus);
        c.admissible.push_back(ok);
    }
    return c;
}

/// Flags each t on (0, t_max] (spacing `step`) where some phi~_j(t) < 0 for
/// j <= j_max. Returns (t, admissible) pairs.
inline std::vector<std::pair<double, bool>> gt_admissible_range(const FrequencyCounts& fc, double t_max,
                                                               int j_max = 0, double step = 0.01) {
    if (!(t_max >= 1.0)) throw std::invalid_argument("t_max must be >= 1");
    if (j_max <= 0) j_max = static_cast<int>(fc.max_frequency());
    std::vector<std::pair<double, bool>> out;
    const auto n = static_cast<long>(std::floor(t_max / step + 1e-9));
    for (long i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) * step;
        bool ok = true;
        for (int j = 1; j <= j_max && ok; ++j) ok = gt_phi(fc, j, t) >= 0.0;
        out.emplace_back(t, ok);
    }
    return out;
}

}  // namespace accum
