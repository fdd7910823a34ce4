#pragma once

// Finite mixing distributions over Poisson rates and the mixture densities
// built on them.
//
// The same type serves two readings. As Q its weights are the
// zero-truncation-tilted omega_u that govern observed species; as Theta they
// are the pi_u governing all species. theta_to_q / q_to_theta convert.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "accum/freq_data.hpp"
#include "accum/numerics.hpp"

namespace accum {

/// Support points below this fraction of the largest one are treated as
/// exactly zero and use the limiting density forms.
inline constexpr double kZeroSupportRatio = 1e-8;

class DegenerateSupportError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class MixingDistribution {
public:
    struct Atom {
        double gamma;
        double weight;
    };

    MixingDistribution() = default;

    /// Support must be strictly increasing and nonnegative; weights
    /// nonnegative summing to one within 1e-10.
    MixingDistribution(std::vector<double> support, std::vector<double> weights)
        : support_(std::move(support)), weights_(std::move(weights)) {
        validate();
    }

    /// Sorts, merges exact duplicates and rescales weights to sum to one.
    static MixingDistribution normalized(std::vector<Atom> atoms);

    static MixingDistribution point_mass(double gamma) { return MixingDistribution({gamma}, {1.0}); }

    std::size_t size() const noexcept { return support_.size(); }
    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double gamma(std::size_t u) const { return support_.at(u); }
    double weight(std::size_t u) const { return weights_.at(u); }

    /// True when support point u is numerically zero.
    bool is_zero(std::size_t u) const {
        return support_[u] == 0.0 || support_[u] < kZeroSupportRatio * support_.back();
    }
    bool has_zero_support() const { return !support_.empty() && is_zero(0); }

    bool operator==(const MixingDistribution&) const = default;

private:
    void validate() const {
        if (support_.empty()) throw std::invalid_argument("mixing distribution needs at least one atom");
        if (support_.size() != weights_.size()) throw std::invalid_argument("support/weight size mismatch");
        double total = 0.0;
        for (std::size_t u = 0; u < support_.size(); ++u) {
            if (!(support_[u] >= 0.0) || !std::isfinite(support_[u]))
                throw std::invalid_argument("support points must be finite and nonnegative");
            if (u > 0 && !(support_[u] > support_[u - 1]))
                throw std::invalid_argument("support must be strictly increasing");
            if (!(weights_[u] >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
            total += weights_[u];
        }
        if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("weights must sum to one");
        std::size_t zeros = 0;
        for (std::size_t u = 0; u < support_.size(); ++u) zeros += is_zero(u) ? 1 : 0;
        if (zeros > 1) throw std::invalid_argument("at most one zero support point");
    }

    std::vector<double> support_;
    std::vector<double> weights_;
};

inline MixingDistribution MixingDistribution::normalized(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.gamma < b.gamma; });
    std::vector<double> s, w;
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!s.empty() && s.back() == a.gamma) {
            w.back() += a.weight;
        } else {
            s.push_back(a.gamma);
            w.push_back(a.weight);
        }
        total += a.weight;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixing weights sum to zero");
    for (auto& x : w) x /= total;
    return MixingDistribution(std::move(s), std::move(w));
}

/// ln of the zero-truncated Poisson pmf at j >= 1. A zero rate gives the
/// limiting point mass at j = 1.
inline double log_ztp_pmf(std::int64_t j, double gamma, bool zero_rate) {
    if (zero_rate || gamma == 0.0) return j == 1 ? 0.0 : kNegInf;
    return static_cast<double>(j) * std::log(gamma) - log_factorial(j) - log_expm1(gamma);
}

/// ln(1 - e^{-x}) for x > 0.
inline double log_one_minus_exp_neg(double x) {
    return x < 0.693 ? std::log(-std::expm1(-x)) : std::log1p(-std::exp(-x));
}

inline double log_truncated_poisson_mixture_pmf(const MixingDistribution& q, std::int64_t j) {
    if (j < 1) throw std::invalid_argument("truncated mixture pmf needs j >= 1");
    std::vector<double> terms(q.size());
    for (std::size_t u = 0; u < q.size(); ++u)
        terms[u] = std::log(q.weight(u)) + log_ztp_pmf(j, q.gamma(u), q.is_zero(u));
    return log_sum_exp(terms);
}

/// f_Q(j): mixture of zero-truncated Poisson densities.
inline double truncated_poisson_mixture_pmf(const MixingDistribution& q, std::int64_t j) {
    return std::exp(log_truncated_poisson_mixture_pmf(q, j));
}

/// theta_j(t, Q), the expected count of species seen j times at effort t per
/// observed species at t = 1.
inline double theta_j(const MixingDistribution& q, std::int64_t j, double t) {
    if (j < 1) throw std::invalid_argument("theta_j needs j >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("theta_j needs t > 0");
    double zero_part = 0.0;
    std::vector<double> terms;
    terms.reserve(q.size());
    for (std::size_t u = 0; u < q.size(); ++u) {
        if (q.is_zero(u)) {
            if (j == 1) zero_part += q.weight(u) * t;
            continue;
        }
        const double g = q.gamma(u);
        terms.push_back(std::log(q.weight(u)) - g * t + static_cast<double>(j) * std::log(g * t) -
                        log_factorial(j) - log_one_minus_exp_neg(g));
    }
    return zero_part + std::exp(log_sum_exp(terms));
}

/// Sum over j >= 1 of theta_j(t, Q), in closed form.
inline double theta_plus(const MixingDistribution& q, double t) {
    CompensatedSum acc;
    for (std::size_t u = 0; u < q.size(); ++u) {
        if (q.is_zero(u)) {
            acc.add(q.weight(u) * t);
        } else {
            const double g = q.gamma(u);
            acc.add(q.weight(u) * std::expm1(-g * t) / std::expm1(-g));
        }
    }
    return acc.value();
}

/// g_Theta(j): untruncated Poisson mixture pmf, j >= 0.
inline double mixture_pmf(const MixingDistribution& theta, std::int64_t j) {
    if (j < 0) throw std::invalid_argument("mixture_pmf needs j >= 0");
    double zero_part = 0.0;
    std::vector<double> terms;
    for (std::size_t u = 0; u < theta.size(); ++u) {
        if (theta.is_zero(u)) {
            if (j == 0) zero_part += theta.weight(u);
            continue;
        }
        terms.push_back(std::log(theta.weight(u)) + log_poisson_pmf(j, theta.gamma(u)));
    }
    return zero_part + (terms.empty() ? 0.0 : std::exp(log_sum_exp(terms)));
}

/// pi_u -> omega_u proportional to pi_u (1 - e^{-gamma_u}).
inline MixingDistribution theta_to_q(const MixingDistribution& theta) {
    std::vector<double> w(theta.size());
    double total = 0.0;
    for (std::size_t u = 0; u < theta.size(); ++u) {
        w[u] = theta.is_zero(u) ? 0.0 : theta.weight(u) * -std::expm1(-theta.gamma(u));
        total += w[u];
    }
    if (!(total > 0.0)) throw DegenerateSupportError("Theta has no mass on positive rates");
    for (auto& x : w) x /= total;
    return MixingDistribution(theta.support(), std::move(w));
}

/// omega_u -> pi_u proportional to omega_u / (1 - e^{-gamma_u}). Undefined
/// when Q has a zero support point.
inline MixingDistribution q_to_theta(const MixingDistribution& q) {
    if (q.has_zero_support())
        throw DegenerateSupportError("Q has a zero support point; Theta is undefined");
    std::vector<double> w(q.size());
    double total = 0.0;
    for (std::size_t u = 0; u < q.size(); ++u) {
        w[u] = q.weight(u) / -std::expm1(-q.gamma(u));
        total += w[u];
    }
    for (auto& x : w) x /= total;
    return MixingDistribution(q.support(), std::move(w));
}

/// Theta-view of a fitted Q: the untruncated mixing distribution, the
/// zero-class probability g_Theta(0), and the plug-in richness
/// n_plus / (1 - g_Theta(0)).
struct AbundanceModelView {
    MixingDistribution theta;
    double p0 = 0.0;
    double s_hat = 0.0;
};

inline AbundanceModelView abundance_view(const MixingDistribution& q, std::int64_t n_plus) {
    AbundanceModelView v;
    v.theta = q_to_theta(q);
    v.p0 = mixture_pmf(v.theta, 0);
    v.s_hat = static_cast<double>(n_plus) / (1.0 - v.p0);
    return v;
}

/// Two-column "gamma weight" text, one atom per line.
inline void write_mixture(std::ostream& out, const MixingDistribution& q, int precision = 6) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(precision);
    for (std::size_t u = 0; u < q.size(); ++u) out << q.gamma(u) << ' ' << q.weight(u) << '\n';
    out.flags(flags);
    out.precision(prec);
}

/// Reads the "gamma weight" format; '#' lines and a `gamma weight` header
/// are skipped. Weights are renormalized.
inline MixingDistribution read_mixture(std::istream& in) {
    std::vector<MixingDistribution::Atom> atoms;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto fields = detail::split_fields(line);
        if (fields.size() == 2 && fields[0] == "gamma" && fields[1] == "weight") continue;
        if (fields.size() != 2) throw ParseError(line_no, "expected 'gamma weight'");
        try {
            atoms.push_back({std::stod(fields[0]), std::stod(fields[1])});
        } catch (const std::exception&) {
            throw ParseError(line_no, "expected two numbers");
        }
        if (!(atoms.back().gamma >= 0.0) || !(atoms.back().weight >= 0.0))
            throw ValidationError("line " + std::to_string(line_no) + ": negative gamma or weight");
    }
    if (atoms.empty()) throw ParseError(line_no, "no atoms");
    try {
        return MixingDistribution::normalized(std::move(atoms));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

}  // namespace accum
