#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "accum/mixture.hpp"
#include "accum/numerics.hpp"
#include "fixtures.hpp"

using accum::MixingDistribution;

TEST(Mixture, ThetaNormalizationAtUnitEffort) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto q = fixtures::random_q(rng, trial % 2 == 1);
        accum::CompensatedSum total;
        for (int j = 1; j <= 2000; ++j) total.add(accum::theta_j(q, j, 1.0));
        EXPECT_NEAR(total.value(), 1.0, 1e-10);
        EXPECT_NEAR(accum::theta_plus(q, 1.0), 1.0, 1e-12);
    }
}

TEST(Mixture, ThetaJAtUnitEffortIsTruncatedDensity) {
    const auto q = fixtures::table1_q();
    for (int j = 1; j <= 80; ++j)
        EXPECT_NEAR(accum::theta_j(q, j, 1.0), accum::truncated_poisson_mixture_pmf(q, j), 1e-15);
}

TEST(Mixture, TruncatedDensityMatchesDirectPoissonSum) {
    const auto q = fixtures::table1_q();
    for (int j = 1; j <= 70; ++j) {
        double direct = 0.0;
        for (std::size_t u = 0; u < q.size(); ++u) {
            const double g = q.gamma(u);
            direct += q.weight(u) * std::exp(j * std::log(g) - std::lgamma(j + 1.0)) / std::expm1(g);
        }
        EXPECT_NEAR(accum::truncated_poisson_mixture_pmf(q, j), direct, 1e-12 * std::max(direct, 1e-300));
    }
}

TEST(Mixture, ThetaPlusIsSumOfThetaJ) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto q = fixtures::random_q(rng, true);
        for (double t : {0.1, 0.7, 1.5, 3.0}) {
            accum::CompensatedSum s;
            for (int j = 1; j <= 4000; ++j) s.add(accum::theta_j(q, j, t));
            EXPECT_NEAR(s.value(), accum::theta_plus(q, t), 1e-9 * accum::theta_plus(q, t));
        }
    }
}

TEST(Mixture, ZeroSupportIsTheSmallRateLimit) {
    const MixingDistribution exact({0.0, 2.0}, {0.3, 0.7});
    const MixingDistribution near({1e-7, 2.0}, {0.3, 0.7});
    for (double t : {0.5, 1.0, 2.5})
        for (int j = 1; j <= 4; ++j) EXPECT_NEAR(accum::theta_j(exact, j, t), accum::theta_j(near, j, t), 1e-6);
    EXPECT_NEAR(accum::theta_j(exact, 1, 2.0), 0.3 * 2.0 + accum::theta_j(MixingDistribution({2.0}, {1.0}), 1, 2.0) * 0.7,
                1e-12);
    EXPECT_TRUE(exact.has_zero_support());
    EXPECT_FALSE(fixtures::table1_q().has_zero_support());
}

TEST(Mixture, ThetaQRoundTrip) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto q = fixtures::random_q(rng);
        const auto back = accum::theta_to_q(accum::q_to_theta(q));
        for (std::size_t u = 0; u < q.size(); ++u) EXPECT_NEAR(back.weight(u), q.weight(u), 1e-12);
    }
}

TEST(Mixture, AbundanceViewRichness) {
    const auto q = MixingDistribution::point_mass(1.0);
    const auto v = accum::abundance_view(q, 100);
    EXPECT_NEAR(v.p0, std::exp(-1.0), 1e-15);
    EXPECT_NEAR(v.s_hat, 100.0 / (1.0 - std::exp(-1.0)), 1e-10);
    EXPECT_THROW(accum::abundance_view(MixingDistribution({0.0, 1.0}, {0.5, 0.5}), 10), accum::DegenerateSupportError);
}

TEST(Mixture, TextRoundTrip) {
    const auto q = fixtures::table1_q();
    std::stringstream s;
    s << "# fitted\ngamma weight\n";
    accum::write_mixture(s, q, 17);
    const auto back = accum::read_mixture(s);
    ASSERT_EQ(back.size(), q.size());
    for (std::size_t u = 0; u < q.size(); ++u) {
        EXPECT_DOUBLE_EQ(back.gamma(u), q.gamma(u));
        EXPECT_NEAR(back.weight(u), q.weight(u), 1e-15);
    }
}

TEST(MixtureErrors, InvalidDistributions) {
    EXPECT_THROW(MixingDistribution({}, {}), std::invalid_argument);
    EXPECT_THROW(MixingDistribution({2.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(MixingDistribution({1.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(MixingDistribution({-1.0}, {1.0}), std::invalid_argument);
    EXPECT_THROW(MixingDistribution({1.0}, {0.9}), std::invalid_argument);
    EXPECT_THROW(MixingDistribution({1.0, 2.0}, {1.2, -0.2}), std::invalid_argument);
    EXPECT_THROW(MixingDistribution({0.0, 1e-12, 1.0}, {0.2, 0.3, 0.5}), std::invalid_argument);
    EXPECT_THROW(accum::theta_j(fixtures::table1_q(), 0, 1.0), std::invalid_argument);
    EXPECT_THROW(accum::theta_j(fixtures::table1_q(), 1, 0.0), std::invalid_argument);
    std::istringstream bad("1.0\n");
    EXPECT_THROW(accum::read_mixture(bad), accum::ParseError);
    std::istringstream neg("1.0 -0.5\n");
    EXPECT_THROW(accum::read_mixture(neg), accum::ValidationError);
}

TEST(Mixture, SingleComponentClosedForms) {
    for (double g : {0.05, 1.0, 7.5}) {
        const auto q = MixingDistribution::point_mass(g);
        EXPECT_NEAR(accum::truncated_poisson_mixture_pmf(q, 1), g / std::expm1(g), 1e-15);
        for (double t : {0.3, 1.0, 2.2})
            EXPECT_NEAR(accum::theta_j(q, 1, t), std::exp(-g * t) * g * t / -std::expm1(-g), 1e-14);
        const auto back = accum::theta_to_q(q);
        EXPECT_EQ(back.support(), q.support());
        EXPECT_DOUBLE_EQ(back.weight(0), 1.0);
    }
    EXPECT_EQ(accum::mixture_pmf(MixingDistribution::point_mass(0.0), 0), 1.0);
}

TEST(Mixture, PublishedMixtureDensity) {
    const auto q = fixtures::table1_q();
    EXPECT_NEAR(accum::truncated_poisson_mixture_pmf(q, 5), 10.4 / 188.0, 0.002);
    accum::CompensatedSum tail;
    for (int j = 1; j <= 500; ++j) tail.add(accum::truncated_poisson_mixture_pmf(q, j));
    EXPECT_GE(tail.value(), 1.0 - 1e-9);
    accum::CompensatedSum plus;
    for (int j = 1; j <= 500; ++j) plus.add(188.0 * accum::theta_j(q, j, 1.0));
    EXPECT_NEAR(plus.value(), 188.0, 1e-9);
}

TEST(Mixture, ThetaViewIdentities) {
    const auto q = fixtures::table1_q();
    const auto v = accum::abundance_view(q, 188);
    double p0 = 0.0;
    for (std::size_t u = 0; u < v.theta.size(); ++u) p0 += v.theta.weight(u) * std::exp(-v.theta.gamma(u));
    EXPECT_NEAR(v.p0, p0, 1e-12);
    EXPECT_TRUE(std::isfinite(v.s_hat));
    EXPECT_GT(v.s_hat, 188.0);
    std::mt19937_64 rng(6);
    for (int k = 0; k < 40; ++k) {
        const int j = std::uniform_int_distribution<int>(1, 100)(rng);
        const double f = accum::truncated_poisson_mixture_pmf(q, j);
        EXPECT_NEAR(f, accum::mixture_pmf(v.theta, j) / (1.0 - v.p0), 1e-12 * std::max(f, 1e-300) + 1e-300);
    }
    accum::CompensatedSum g;
    for (int j = 0; j <= 500; ++j) g.add(accum::mixture_pmf(v.theta, j));
    EXPECT_GE(g.value(), 1.0 - 1e-9);
}
