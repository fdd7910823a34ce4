#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "accum/curves.hpp"
#include "accum/numerics.hpp"
#include "fixtures.hpp"

using accum::MixingDistribution;

namespace {

const accum::NpmleFit& plant_fit() {
    static const auto fit = accum::fit_npmle(fixtures::plant());
    return fit;
}

/// sum_{k} C(k + j, j) t^j (1 - t)^k n_plus f_Q(k + j), truncated at k + j = 200.
double smoothing_series(const MixingDistribution& q, std::int64_t n_plus, int j, double t) {
    accum::CompensatedSum s;
    for (int k = 0; k + j <= 200; ++k) {
        const double lt = accum::log_binomial(k + j, j) + j * std::log(t) +
                          (t < 1.0 ? k * std::log1p(-t) : (k == 0 ? 0.0 : accum::kNegInf));
        s.add(std::exp(lt) * static_cast<double>(n_plus) * accum::truncated_poisson_mixture_pmf(q, k + j));
    }
    return s.value();
}

}  // namespace

TEST(Curves, SmoothingSeriesIdentity) {
    const auto fc = fixtures::plant();
    const auto& fit = plant_fit();
    for (double t : {0.01, 0.2, 0.5, 0.8, 0.99, 1.0})
        for (int j = 1; j <= 12; ++j)
            EXPECT_NEAR(accum::lik_phi(fit, fc, j, t), smoothing_series(fit.q_hat, fc.n_plus(), j, t), 1e-6)
                << j << ' ' << t;
}

TEST(Curves, CountsSumToObservedRichnessAtUnitEffort) {
    const auto fc = fixtures::plant();
    accum::CompensatedSum s;
    for (int j = 1; j <= 3000; ++j) s.add(accum::lik_phi(plant_fit(), fc, j, 1.0));
    EXPECT_NEAR(s.value(), 188.0, 1e-8);
    EXPECT_NEAR(accum::lik_phi_plus(plant_fit(), fc, 1.0), 188.0, 1e-10);
}

TEST(Curves, PhiPlusMonotoneAndCountsNonnegative) {
    const auto fc = fixtures::plant();
    const auto& fit = plant_fit();
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double t = 0.01 * i;
        const double plus = accum::lik_phi_plus(fit, fc, t);
        EXPECT_GE(plus, prev);
        prev = plus;
        for (int j = 1; j <= 70; j += 3) EXPECT_GE(accum::lik_phi(fit, fc, j, t), 0.0);
    }
}

TEST(Curves, RandomMixturesStayAdmissible) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto q = fixtures::random_q(rng, true);
        double prev = 0.0;
        for (double t = 0.05; t < 20.0; t *= 1.3) {
            const double plus = accum::lik_phi_plus(q, 100, t);
            EXPECT_GE(plus, prev);
            prev = plus;
            for (int j = 1; j <= 30; ++j) EXPECT_GE(accum::lik_phi(q, 100, j, t), 0.0);
        }
    }
}

TEST(Curves, LargeEffortLimits) {
    const auto q = fixtures::table1_q();
    for (int j = 1; j <= 5; ++j) EXPECT_LT(accum::lik_phi(q, 188, j, 500.0), 1e-100);
    const MixingDistribution z({0.0, 1.5}, {0.4, 0.6});
    EXPECT_NEAR(accum::lik_phi(z, 100, 1, 1e3) / 1e3, 40.0, 1e-9);
    EXPECT_LT(accum::lik_phi(z, 100, 2, 1e3), 1e-100);
}

TEST(Curves, ChaoFunctional) {
    EXPECT_NEAR(accum::chao_functional(61.0, 35.0, 188.0).value, 241.157142857, 1e-8);
    const auto fb = accum::chao_functional(5.0, 0.0, 10.0);
    EXPECT_TRUE(fb.degenerate);
    EXPECT_EQ(fb.value, 20.0);
    EXPECT_EQ(accum::chao_functional(0.0, 3.0, 10.0).value, 10.0);
    const auto& fit = plant_fit();
    EXPECT_NEAR(accum::lik_chao(fit.q_hat, 188, 1.0).value, 243.7, 0.5);
}

TEST(Curves, ChaoGrowthConstant) {
    const MixingDistribution q({0.0, 2.0}, {0.5, 0.5});
    const auto g = accum::chao_growth_constant(q, 100);
    ASSERT_TRUE(g);
    EXPECT_EQ(g->beta_gamma, 2.0);
    EXPECT_NEAR(g->constant, 100 * 0.25 * -std::expm1(-2.0) / (0.5 * 4.0), 1e-12);
    EXPECT_NEAR(accum::lik_chao(q, 100, 40.0).value / std::exp(2.0 * 40.0) / g->constant, 1.0, 0.01);
    const MixingDistribution q3({0.0, 0.7, 4.0}, {0.2, 0.5, 0.3});
    const auto g3 = accum::chao_growth_constant(q3, 250);
    ASSERT_TRUE(g3);
    EXPECT_NEAR(accum::lik_chao(q3, 250, 60.0).value / std::exp(0.7 * 60.0) / g3->constant, 1.0, 0.01);
    EXPECT_FALSE(accum::chao_growth_constant(plant_fit(), fixtures::plant()));
}

TEST(Curves, CurveLayout) {
    const auto fc = fixtures::plant();
    const auto c = accum::lik_curve(plant_fit(), fc, {0.5, 1.0, 2.0}, 4);
    EXPECT_EQ(c.estimator, accum::Estimator::likelihood);
    ASSERT_EQ(c.phi.size(), 3u);
    EXPECT_EQ(c.phi[0].size(), 4u);
    EXPECT_EQ(c.admissible, std::vector<bool>(3, true));
    EXPECT_NEAR(c.phi_plus[1], 188.0, 1e-10);
}

TEST(CurvesErrors, UnconvergedFitRejected) {
    accum::NpmleFit bad;
    bad.q_hat = fixtures::table1_q();
    const auto fc = fixtures::plant();
    EXPECT_THROW(accum::lik_phi(bad, fc, 1, 1.0), std::logic_error);
    EXPECT_THROW(accum::lik_phi_plus(bad, fc, 1.0), std::logic_error);
    EXPECT_THROW(accum::lik_curve(bad, fc, {1.0}), std::logic_error);
    EXPECT_THROW(accum::lik_phi_plus(fixtures::table1_q(), 10, 0.0), std::invalid_argument);
}

TEST(Curves, ObservedChaoValue) {
    const auto fc = fixtures::plant();
    EXPECT_NEAR(accum::chao_functional(fc[1], fc[2], fc.n_plus()).value, 188.0 + 61.0 * 61.0 / 70.0, 1e-12);
    EXPECT_NEAR(accum::chao_functional(61.0, 35.0, 188.0).value, 241.16, 0.005);
}

TEST(Curves, LinearGrowthWithZeroRate) {
    const MixingDistribution q({0.0, 0.8, 5.0}, {0.3, 0.5, 0.2});
    const auto slope = [&](double t) { return accum::lik_phi_plus(q, 100, t + 1.0) - accum::lik_phi_plus(q, 100, t); };
    EXPECT_NEAR(slope(50.0), 30.0, 1e-9);
    EXPECT_NEAR(slope(100.0), 30.0, 1e-9);
    const auto plant = accum::lik_phi_plus(fixtures::table1_q(), 188, 51.0) - accum::lik_phi_plus(fixtures::table1_q(), 188, 50.0);
    EXPECT_LT(plant, 1e-9);
}
