#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "jlrisk/marginals.hpp"

using jlrisk::GompertzMarginal;

namespace {

GompertzMarginal male65() { return GompertzMarginal(65.0, 85.47, 10.45, 50.0); }

}  // namespace

TEST(Marginals, SurvivalEndpoints) {
    const auto g = male65();
    EXPECT_EQ(g.survival(0.0), 1.0);
    EXPECT_EQ(g.survival(50.0), 0.0);
    EXPECT_EQ(g.survival(-3.0), 1.0);
    EXPECT_EQ(g.survival(80.0), 0.0);
}

TEST(Marginals, SurvivalMatchesHighPrecisionValue) {
    // 1 - Ftilde(20)/Ftilde(50) evaluated with 40-digit arithmetic.
    EXPECT_NEAR(male65().survival(20.0), 0.4426392584219307488, 1e-12);
}

TEST(Marginals, SurvivalIsDecreasing) {
    const auto g = male65();
    double prev = 1.0;
    for (int i = 1; i <= 5000; ++i) {
        const double s = g.survival(i * 0.01);
        EXPECT_LE(s, prev);
        prev = s;
    }
}

TEST(Marginals, QuantileEndpoints) {
    const auto g = male65();
    EXPECT_EQ(g.quantile_survival(1.0), 0.0);
    EXPECT_EQ(g.quantile_survival(0.0), 50.0);
    EXPECT_THROW(g.quantile_survival(-0.01), std::domain_error);
    EXPECT_THROW(g.quantile_survival(1.01), std::domain_error);
}

TEST(Marginals, QuantileRoundTrip) {
    const GompertzMarginal gs[] = {male65(), GompertzMarginal(32.0, 91.57, 8.13, 83.0),
                                   GompertzMarginal(0.0, 80.0, 12.0, 100.5)};
    for (const auto& g : gs) {
        for (int i = 1; i <= 99; ++i) {
            const double p = i / 100.0;
            EXPECT_NEAR(g.survival(g.quantile_survival(p)), p, 1e-10);
        }
    }
}

TEST(Marginals, CurtateProbabilities) {
    const GompertzMarginal g(62.0, 91.57, 8.13, 53.0);
    EXPECT_EQ(g.curtate_survival(0), 1.0);
    EXPECT_EQ(g.horizon(), 53);
    EXPECT_EQ(g.curtate_survival(g.horizon()), 0.0);
    double total = 0.0;
    for (long k = 0; k < g.horizon(); ++k) {
        const double q = g.curtate_survival(k) - g.curtate_survival(k + 1);
        EXPECT_GE(q, 0.0);
        total += q;
    }
    EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Marginals, NonIntegerLifespanHorizon) {
    const GompertzMarginal g(10.0, 85.0, 10.0, 40.5);
    EXPECT_EQ(g.horizon(), 41);
    EXPECT_GT(g.curtate_survival(40), 0.0);
    EXPECT_EQ(g.curtate_survival(41), 0.0);
}

TEST(Marginals, RejectsInvalidParameters) {
    EXPECT_THROW(GompertzMarginal(65.0, 85.0, 0.0, 50.0), std::invalid_argument);
    EXPECT_THROW(GompertzMarginal(65.0, 85.0, -1.0, 50.0), std::invalid_argument);
    EXPECT_THROW(GompertzMarginal(65.0, 85.0, 10.0, 0.0), std::invalid_argument);
    EXPECT_THROW(GompertzMarginal(-1.0, 85.0, 10.0, 50.0), std::invalid_argument);
}
