#pragma once

// Synthetic assemblages: s species with Poisson sampling rates drawn i.i.d.
// from Theta, observed over [0, t_end]; or, conditionally, a multinomial
// sample of h individuals with species probabilities proportional to the
// rates.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "accum/freq_data.hpp"
#include "accum/mixture.hpp"

namespace accum {

struct SimulationConfig {
    std::int64_t s = 1;
    MixingDistribution theta;  ///< weights read as pi_u
    double t_end = 1.0;
    std::uint64_t seed = 0;
};

struct SimulationResult {
    /// Empty when no species was observed.
    std::optional<FrequencyCounts> counts;
    /// Ground truth: rate of every species, observed or not.
    std::vector<double> rates;
    /// Y_i(t_end) for every species, zeros included.
    std::vector<std::int64_t> abundances;
};

namespace detail {
inline void check_config(const SimulationConfig& cfg) {
    if (cfg.s < 1) throw std::invalid_argument("simulation needs s >= 1");
    if (!(cfg.t_end > 0.0)) throw std::invalid_argument("simulation needs t_end > 0");
    if (cfg.theta.size() == 0) throw std::invalid_argument("simulation needs a mixing distribution");
}

inline std::optional<FrequencyCounts> tally_positive(std::span<const std::int64_t> abundances) {
    FrequencyCounts::Map m;
    for (auto y : abundances)
        if (y > 0) ++m[y];
    if (m.empty()) return std::nullopt;
    return FrequencyCounts(m);
}
}  // namespace detail

inline std::vector<double> draw_rates(const MixingDistribution& theta, std::int64_t s, std::mt19937_64& rng) {
    std::discrete_distribution<std::size_t> pick(theta.weights().begin(), theta.weights().end());
    std::vector<double> rates(static_cast<std::size_t>(s));
    for (auto& r : rates) r = theta.support()[pick(rng)];
    return rates;
}

/// Y_i ~ Poisson(rate_i * t_end), independently.
inline std::vector<std::int64_t> poisson_sample(std::span<const double> rates, double t_end, std::mt19937_64& rng) {
    std::vector<std::int64_t> y(rates.size(), 0);
    for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] <= 0.0) continue;
        std::poisson_distribution<std::int64_t> pois(rates[i] * t_end);
        y[i] = pois(rng);
    }
    return y;
}

/// Per-species counts of h individuals drawn with probabilities proportional
/// to `rates`.
inline std::vector<std::int64_t> multinomial_sample(std::span<const double> rates, std::int64_t h,
                                                    std::mt19937_64& rng) {
    if (h < 1) throw std::invalid_argument("multinomial sample needs h >= 1");
    double total = 0.0;
    for (double r : rates) total += r;
    if (!(total > 0.0)) throw std::invalid_argument("all species rates are zero");
    std::discrete_distribution<std::size_t> pick(rates.begin(), rates.end());
    std::vector<std::int64_t> y(rates.size(), 0);
    for (std::int64_t k = 0; k < h; ++k) ++y[pick(rng)];
    return y;
}

/// Uniform subsample of h of the sum(abundances) individuals, without
/// replacement.
inline std::vector<std::int64_t> thin_sample(std::span<const std::int64_t> abundances, std::int64_t h,
                                             std::mt19937_64& rng) {
    std::vector<std::size_t> individuals;
    for (std::size_t i = 0; i < abundances.size(); ++i)
        individuals.insert(individuals.end(), static_cast<std::size_t>(abundances[i]), i);
    if (h < 0 || static_cast<std::size_t>(h) > individuals.size())
        throw std::domain_error("cannot thin to more individuals than sampled");
    std::vector<std::int64_t> out(abundances.size(), 0);
    // Partial Fisher-Yates.
    for (std::size_t k = 0; k < static_cast<std::size_t>(h); ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, individuals.size() - 1);
        std::swap(individuals[k], individuals[pick(rng)]);
        ++out[individuals[k]];
    }
    return out;
}

inline SimulationResult simulate_counts(const SimulationConfig& cfg) {
    detail::check_config(cfg);
    std::mt19937_64 rng(cfg.seed);
    SimulationResult r;
    r.rates = draw_rates(cfg.theta, cfg.s, rng);
    r.abundances = poisson_sample(r.rates, cfg.t_end, rng);
    r.counts = detail::tally_positive(r.abundances);
    return r;
}

/// Conditional sampler: rates from Theta, then h individuals multinomially.
inline FrequencyCounts simulate_multinomial(const SimulationConfig& cfg, std::int64_t h) {
    detail::check_config(cfg);
    std::mt19937_64 rng(cfg.seed);
    const auto rates = draw_rates(cfg.theta, cfg.s, rng);
    const auto y = multinomial_sample(rates, h, rng);
    return *detail::tally_positive(y);
}

}  // namespace accum
