#pragma once

// Log-space combinatorics and summation helpers shared by every estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace accum {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Table of ln(k!) for k = 0..size()-1, built by cumulative summation of ln k
/// so that integer arguments are exact up to summation rounding.
class LogFactorialTable {
public:
    explicit LogFactorialTable(std::size_t max_n) : values_(max_n + 1, 0.0) {
        for (std::size_t k = 1; k <= max_n; ++k)
            values_[k] = values_[k - 1] + std::log(static_cast<double>(k));
    }

    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    double operator()(std::int64_t k) const {
        if (k < 0) throw std::out_of_range("log factorial of negative argument");
        if (static_cast<std::size_t>(k) < values_.size()) return values_[static_cast<std::size_t>(k)];
        return std::lgamma(static_cast<double>(k) + 1.0);
    }

private:
    std::vector<double> values_;
};

/// Process-wide table; immutable after first use.
inline const LogFactorialTable& log_factorials() {
    static const LogFactorialTable table(1 << 16);
    return table;
}

inline double log_factorial(std::int64_t k) { return log_factorials()(k); }

/// ln C(n, k); -inf when k < 0 or k > n.
inline double log_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0) throw std::invalid_argument("log_binomial: n must be nonnegative");
    if (k < 0 || k > n) return kNegInf;
    const auto& lf = log_factorials();
    return lf(n) - lf(k) - lf(n - k);
}

/// ln of the Poisson pmf at j with mean lambda > 0.
inline double log_poisson_pmf(std::int64_t j, double lambda) {
    return -lambda + static_cast<double>(j) * std::log(lambda) - log_factorial(j);
}

/// ln(e^x - 1) for x > 0 without overflow or cancellation.
inline double log_expm1(double x) {
    return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs) {
    double m = kNegInf;
    for (double x : xs) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// A real number stored as sign * exp(log_magnitude).
struct SignedLog {
    double log_magnitude = kNegInf;
    int sign = 0;

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

/// Sums signed log-magnitude terms in descending magnitude with compensation.
/// Used for alternating series whose terms span many orders of magnitude.
inline double sum_signed_terms(std::vector<SignedLog> terms) {
    std::sort(terms.begin(), terms.end(), [](const SignedLog& a, const SignedLog& b) {
        return a.log_magnitude > b.log_magnitude;
    });
    CompensatedSum acc;
    for (const auto& t : terms)
        if (t.sign != 0) acc.add(t.value());
    return acc.value();
}

}  // namespace accum
