#pragma once

// Parametric bootstrap for richness functionals G(phi(t)).
//
// Each replicate draws n_plus* ~ Binomial(round(s_hat), 1 - g_Theta(0)) from
// the Theta-view of the fitted Q, then n_plus* species frequencies from the
// fitted zero-truncated mixture f_Q, refits the NPMLE and evaluates G on the
// grid. Limits are percentiles of the replicate values (linear
// interpolation between order statistics).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "accum/curves.hpp"
#include "accum/freq_data.hpp"
#include "accum/mixture.hpp"
#include "accum/npmle.hpp"

namespace accum {

enum class Functional { phi_plus, chao };

inline const char* to_string(Functional f) { return f == Functional::chao ? "chao" : "phi_plus"; }

inline double evaluate_functional(const MixingDistribution& q, std::int64_t n_plus, Functional f, double t) {
    return f == Functional::chao ? lik_chao(q, n_plus, t).value : lik_phi_plus(q, n_plus, t);
}

/// SplitMix64 finalizer over (master, counter); gives each replicate an
/// independent stream regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

struct Resample {
    FrequencyCounts counts;
    /// n_plus* was drawn from Poisson(n_plus) because Q^ has a zero support
    /// point and the Theta-view is undefined.
    bool poisson_fallback = false;
};

namespace detail {

/// One draw from the zero-truncated Poisson with rate gamma.
inline std::int64_t draw_ztp(double gamma, bool zero_rate, std::mt19937_64& rng) {
    if (zero_rate) return 1;
    if (gamma >= 1.0) {
        std::poisson_distribution<std::int64_t> pois(gamma);
        for (;;) {
            const auto y = pois(rng);
            if (y > 0) return y;
        }
    }
    // Inversion; P(j) = gamma^j / (j! (e^gamma - 1)).
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double p = gamma / std::expm1(gamma);
    double cdf = p;
    std::int64_t j = 1;
    while (u > cdf && j < 10000) {
        ++j;
        p *= gamma / static_cast<double>(j);
        cdf += p;
    }
    return j;
}

}  // namespace detail

inline Resample resample_counts(const MixingDistribution& q, std::int64_t n_plus, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const bool fallback = q.has_zero_support();
    std::int64_t n_star = 0;
    std::uint64_t trials = 0;
    double p_obs = 0.0;
    if (!fallback) {
        const auto view = abundance_view(q, n_plus);
        trials = static_cast<std::uint64_t>(std::max<double>(std::llround(view.s_hat), static_cast<double>(n_plus)));
        p_obs = 1.0 - view.p0;
    }
    do {
        if (fallback) {
            std::poisson_distribution<std::int64_t> pois(static_cast<double>(n_plus));
            n_star = pois(rng);
        } else {
            std::binomial_distribution<std::int64_t> binom(static_cast<std::int64_t>(trials), p_obs);
            n_star = binom(rng);
        }
    } while (n_star == 0);

    std::discrete_distribution<std::size_t> pick(q.weights().begin(), q.weights().end());
    FrequencyCounts::Map m;
    for (std::int64_t i = 0; i < n_star; ++i) {
        const auto u = pick(rng);
        ++m[detail::draw_ztp(q.gamma(u), q.is_zero(u), rng)];
    }
    return Resample{FrequencyCounts(m), fallback};
}

inline Resample resample_counts(const NpmleFit& fit, const FrequencyCounts& fc, std::uint64_t seed) {
    detail::require_converged(fit);
    return resample_counts(fit.q_hat, fc.n_plus(), seed);
}

struct BootstrapOptions {
    int replicates = 400;
    double level = 0.95;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    SolverOptions solver;
};

struct BootstrapBand {
    Functional functional = Functional::chao;
    std::vector<double> t_grid;
    double level = 0.95;
    std::vector<double> estimate;
    std::vector<double> lower;
    std::vector<double> upper;
    int replicates = 0;
    std::uint64_t seed = 0;
    int refit_failures = 0;
    /// More than 1% of refits failed.
    bool unreliable = false;
    bool poisson_fallback = false;
    /// Per t: the point estimate fell outside [lower, upper].
    std::vector<bool> point_outside;
    std::vector<std::string> warnings;
};

/// Linear interpolation between order statistics (R's type 7).
inline double percentile(std::vector<double> xs, double p) {
    if (xs.empty()) throw std::invalid_argument("percentile of an empty sample");
    std::sort(xs.begin(), xs.end());
    const double h = (static_cast<double>(xs.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

namespace detail {

/// Fits, accepting the boundary solution for single-frequency data.
inline NpmleFit fit_or_boundary(const FrequencyCounts& fc, const SolverOptions& opts, bool* boundary = nullptr) {
    try {
        return fit_npmle(fc, opts);
    } catch (const BoundaryFitError& e) {
        if (boundary) *boundary = true;
        return e.fit();
    }
}

}  // namespace detail

inline BootstrapBand bootstrap_band(const FrequencyCounts& fc, Functional functional, const std::vector<double>& t_grid,
                                    const BootstrapOptions& opts = {}) {
    if (opts.replicates < 50) throw std::invalid_argument("bootstrap needs at least 50 replicates");
    if (!(opts.level > 0.0 && opts.level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");

    BootstrapBand band;
    band.functional = functional;
    band.t_grid = t_grid;
    band.level = opts.level;
    band.replicates = opts.replicates;
    band.seed = opts.seed;

    bool boundary = false;
    const auto fit = detail::fit_or_boundary(fc, opts.solver, &boundary);
    if (!fit.converged) throw ConvergenceError("NPMLE did not converge on the observed data");
    if (boundary) band.warnings.push_back("single distinct frequency: using the boundary NPMLE");
    if (fit.q_hat.has_zero_support()) {
        band.poisson_fallback = true;
        band.warnings.push_back("fitted Q has a zero support point: n_plus* drawn from Poisson(n_plus)");
    }
    for (double t : t_grid) band.estimate.push_back(evaluate_functional(fit.q_hat, fc.n_plus(), functional, t));

    const auto B = static_cast<std::size_t>(opts.replicates);
    std::vector<std::vector<double>> values(B);
    std::vector<char> ok(B, 0);

    auto run_replicate = [&](std::size_t b) {
        const auto rs = resample_counts(fit.q_hat, fc.n_plus(), derive_seed(opts.seed, b));
        const auto refit = detail::fit_or_boundary(rs.counts, opts.solver);
        if (!refit.converged) return;
        std::vector<double> row;
        row.reserve(t_grid.size());
        for (double t : t_grid) row.push_back(evaluate_functional(refit.q_hat, rs.counts.n_plus(), functional, t));
        values[b] = std::move(row);
        ok[b] = 1;
    };

    const unsigned nthreads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(B)));
    if (nthreads == 1) {
        for (std::size_t b = 0; b < B; ++b) run_replicate(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        for (unsigned k = 0; k < nthreads; ++k)
            workers.emplace_back([&] {
                for (std::size_t b = next++; b < B; b = next++) run_replicate(b);
            });
    }

    for (std::size_t b = 0; b < B; ++b) band.refit_failures += ok[b] ? 0 : 1;
    band.unreliable = band.refit_failures > 0.01 * static_cast<double>(B);
    if (band.refit_failures > 0)
        band.warnings.push_back(std::to_string(band.refit_failures) + " replicate refits did not converge");

    const double alpha = (1.0 - opts.level) / 2.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        std::vector<double> col;
        col.reserve(B);
        for (std::size_t b = 0; b < B; ++b)
            if (ok[b]) col.push_back(values[b][i]);
        if (col.empty()) throw ConvergenceError("every bootstrap refit failed");
        band.lower.push_back(percentile(col, alpha));
        band.upper.push_back(percentile(col, 1.0 - alpha));
        band.point_outside.push_back(band.estimate[i] < band.lower.back() || band.estimate[i] > band.upper.back());
    }
    return band;
}

}  // namespace accum
