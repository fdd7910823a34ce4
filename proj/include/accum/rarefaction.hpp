#pragma once

// Exact rarefaction under the multinomial model. For a reference sample of
// a individuals, m_bar_j(h) is the average number of species seen j times
// over all C(a, h) subsamples of size h:
//
//   m_bar_j(h) = sum_b C(b, j) C(a - b, h - j) / C(a, h) * n_b.
//
// The same quantity can be written as sum_k C(h, j) C(a - h, k) / C(a, k + j)
// * n_{k+j}; both are evaluated in log space. Neither extends beyond h = a.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "accum/freq_data.hpp"
#include "accum/good_toulmin.hpp"
#include "accum/numerics.hpp"

namespace accum {

namespace detail {
inline void check_subsample(const FrequencyCounts& fc, std::int64_t h, std::int64_t j) {
    if (h < 1) throw std::invalid_argument("subsample size must be >= 1");
    if (j < 1) throw std::invalid_argument("frequency must be >= 1");
    if (h > fc.individuals())
        throw std::domain_error("subsample size " + std::to_string(h) + " exceeds the " +
                                std::to_string(fc.individuals()) +
                                " sampled individuals; the rarefaction identity does not hold beyond h = a");
}
}  // namespace detail

inline double rarefy(const FrequencyCounts& fc, std::int64_t h, std::int64_t j) {
    detail::check_subsample(fc, h, j);
    if (j > h) return 0.0;
    const auto a = fc.individuals();
    if (h == a) return static_cast<double>(fc[j]);
    const double log_total = log_binomial(a, h);
    CompensatedSum acc;
    for (auto it = fc.counts().lower_bound(j); it != fc.counts().end() && it->first <= a - h + j; ++it) {
        const auto [b, n] = *it;
        acc.add(static_cast<double>(n) * std::exp(log_binomial(b, j) + log_binomial(a - b, h - j) - log_total));
    }
    return acc.value();
}

inline double rarefy_via_binomial_identity(const FrequencyCounts& fc, std::int64_t h, std::int64_t j) {
    detail::check_subsample(fc, h, j);
    if (j > h) return 0.0;
    const auto a = fc.individuals();
    if (h == a) return static_cast<double>(fc[j]);
    const double lead = log_binomial(h, j);
    CompensatedSum acc;
    for (auto it = fc.counts().lower_bound(j); it != fc.counts().end() && it->first - j <= a - h; ++it) {
        const auto [b, n] = *it;
        acc.add(static_cast<double>(n) * std::exp(lead + log_binomial(a - h, b - j) - log_binomial(a, b)));
    }
    return acc.value();
}

/// Expected number of species in a subsample of h individuals:
/// n_plus - sum_x C(a - h, x) / C(a, x) * n_x.
inline double hurlbert_expected_richness(const FrequencyCounts& fc, std::int64_t h) {
    detail::check_subsample(fc, h, 1);
    const auto a = fc.individuals();
    CompensatedSum acc;
    acc.add(static_cast<double>(fc.n_plus()));
    for (auto it = fc.counts().begin(); it != fc.counts().end() && it->first <= a - h; ++it) {
        const auto [x, n] = *it;
        acc.add(-static_cast<double>(n) * std::exp(log_binomial(a - h, x) - log_binomial(a, x)));
    }
    return acc.value();
}

struct RarefactionCurve {
    std::vector<std::int64_t> h_grid;
    int j_max = 0;
    /// m_bar[i][j - 1] is m_bar_j(h_grid[i]).
    std::vector<std::vector<double>> m_bar;
    /// Row sums over every j, not just j <= j_max.
    std::vector<double> m_bar_plus;
};

/// `j_max` <= 0 selects d.
inline RarefactionCurve rarefaction_curve(const FrequencyCounts& fc, const std::vector<std::int64_t>& h_grid,
                                          int j_max = 0) {
    RarefactionCurve c;
    c.h_grid = h_grid;
    c.j_max = j_max > 0 ? j_max : static_cast<int>(fc.max_frequency());
    const auto d = fc.max_frequency();
    for (auto h : h_grid) {
        std::vector<double> row(static_cast<std::size_t>(c.j_max), 0.0);
        CompensatedSum plus;
        for (std::int64_t j = 1; j <= std::min(h, std::max<std::int64_t>(d, c.j_max)); ++j) {
            const double v = rarefy(fc, h, j);
            if (j <= c.j_max) row[static_cast<std::size_t>(j - 1)] = v;
            plus.add(v);
        }
        c.m_bar.push_back(std::move(row));
        c.m_bar_plus.push_back(plus.value());
    }
    return c;
}

/// max over h = 1..a of |phi~_j(h / a) - m_bar_j(h)|.
inline double gt_rarefaction_gap(const FrequencyCounts& fc, std::int64_t j) {
    const auto a = fc.individuals();
    double worst = 0.0;
    for (std::int64_t h = 1; h <= a; ++h) {
        const double t = static_cast<double>(h) / static_cast<double>(a);
        worst = std::max(worst, std::abs(gt_phi(fc, j, t) - rarefy(fc, h, j)));
    }
    return worst;
}

struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

inline constexpr std::int64_t kMaxEnumerationIndividuals = 20;

/// Brute-force rarefaction: labels every individual, visits all C(a, h)
/// subsamples and averages the number of species represented exactly j
/// times. Exact; refuses samples with more than 20 individuals.
inline Rational enumerate_subsamples_oracle(const AbundanceSample& sample, std::int64_t h, std::int64_t j) {
    const auto a = sample.individuals();
    if (a > kMaxEnumerationIndividuals)
        throw std::length_error("subsample enumeration limited to " + std::to_string(kMaxEnumerationIndividuals) +
                                " individuals");
    if (h < 1 || h > a) throw std::domain_error("subsample size out of range");

    std::vector<int> species_of;
    for (std::size_t i = 0; i < sample.per_species().size(); ++i)
        species_of.insert(species_of.end(), static_cast<std::size_t>(sample.per_species()[i]), static_cast<int>(i));

    std::vector<int> tally(sample.per_species().size());
    std::uint64_t hits = 0, subsets = 0;
    const std::uint32_t limit = 1u << a;
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        if (std::popcount(mask) != h) continue;
        ++subsets;
        std::fill(tally.begin(), tally.end(), 0);
        for (std::int64_t r = 0; r < a; ++r)
            if (mask & (1u << r)) ++tally[static_cast<std::size_t>(species_of[static_cast<std::size_t>(r)])];
        for (int c : tally) hits += c == j ? 1 : 0;
    }
    const std::uint64_t g = std::gcd(hits, subsets);
    return {hits / g, subsets / g};
}

}  // namespace accum
