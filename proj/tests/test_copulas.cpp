#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "jlrisk/copulas.hpp"

using jlrisk::Copula;
using jlrisk::UnitPoint;

namespace {

constexpr double kTol = 1e-12;

std::vector<UnitPoint> decreasing_chain() {
    // (Fbar(k), Gbar(k))-like points, decreasing in both coordinates.
    std::vector<UnitPoint> pts;
    for (int k = 1; k <= 40; ++k) {
        const double t = k / 41.0;
        pts.push_back({std::exp(-2.0 * t * t), std::exp(-1.5 * t * t * t) * (1.0 - t * 0.3)});
    }
    return pts;
}

std::vector<std::pair<std::string, Copula>> all_kinds() {
    const Copula ref = Copula::survival_of(Copula::gumbel(1.96));
    std::vector<UnitPoint> inner;
    for (const auto& p : decreasing_chain()) {
        if (p.u >= 0.2 && p.u <= 0.8 && p.v >= 0.2 && p.v <= 0.8) inner.push_back(p);
    }
    return {
        {"independence", Copula::independence()},
        {"comonotone", Copula::comonotone()},
        {"countermonotone", Copula::countermonotone()},
        {"gumbel_1", Copula::gumbel(1.0)},
        {"gumbel_1.96", Copula::gumbel(1.96)},
        {"gumbel_8", Copula::gumbel(8.0)},
        {"survival_gumbel", ref},
        {"survival_countermonotone", Copula::survival_of(Copula::countermonotone())},
        {"tau_lower", Copula::tau_band_lower(0.49)},
        {"tau_upper", Copula::tau_band_upper(0.49)},
        {"tau_lower_neg", Copula::tau_band_lower(-0.3)},
        {"tau_upper_neg", Copula::tau_band_upper(-0.3)},
        {"tankov_lower", Copula::tankov_lower(inner, ref)},
        {"tankov_upper", Copula::tankov_upper(inner, ref)},
    };
}

}  // namespace

TEST(Copulas, GumbelSpecialValues) {
    const Copula g1 = Copula::gumbel(1.0);
    for (double u : {0.1, 0.37, 0.8}) {
        for (double v : {0.05, 0.5, 0.93}) EXPECT_NEAR(g1(u, v), u * v, 1e-15);
    }
    EXPECT_NEAR(Copula::gumbel(2.0)(std::exp(-1.0), std::exp(-1.0)), 0.2431167344342142108, 1e-15);
    EXPECT_EQ(Copula::gumbel(2.0)(0.0, 0.4), 0.0);
    EXPECT_EQ(Copula::gumbel(2.0)(1.0, 0.4), 0.4);
    EXPECT_EQ(Copula::gumbel(2.0)(1e-320, 0.4), 0.0);
    EXPECT_THROW(Copula::gumbel(0.99), std::domain_error);
}

TEST(Copulas, QuasiCopulaSuite) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& [name, c] : all_kinds()) {
        SCOPED_TRACE(name);
        for (int i = 0; i < 10000; ++i) {
            const double u = U(rng), v = U(rng), h = U(rng) * 0.1;
            ASSERT_NEAR(c(u, 0.0), 0.0, kTol);
            ASSERT_NEAR(c(0.0, v), 0.0, kTol);
            ASSERT_NEAR(c(u, 1.0), u, kTol);
            ASSERT_NEAR(c(1.0, v), v, kTol);
            const double x = c(u, v);
            ASSERT_GE(x, std::max(0.0, u + v - 1.0) - kTol);
            ASSERT_LE(x, std::min(u, v) + kTol);
            const double u2 = std::min(1.0, u + h), v2 = std::min(1.0, v + h);
            ASSERT_GE(c(u2, v), x - kTol);
            ASSERT_GE(c(u, v2), x - kTol);
            ASSERT_LE(c(u2, v) - x, (u2 - u) + kTol);
            ASSERT_LE(c(u, v2) - x, (v2 - v) + kTol);
        }
    }
}

TEST(Copulas, TwoIncreasingForCopulaKinds) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (const auto& [name, c] : all_kinds()) {
        const bool check = c.is_copula() || name == "tankov_lower";
        if (!check) continue;
        SCOPED_TRACE(name);
        for (int i = 0; i < 10000; ++i) {
            double u1 = U(rng), u2 = U(rng), v1 = U(rng), v2 = U(rng);
            if (u1 > u2) std::swap(u1, u2);
            if (v1 > v2) std::swap(v1, v2);
            ASSERT_GE(c(u2, v2) - c(u1, v2) - c(u2, v1) + c(u1, v1), -kTol);
        }
    }
}

TEST(Copulas, SurvivalTransform) {
    const Copula pi = Copula::independence();
    const Copula m = Copula::comonotone();
    const Copula g = Copula::gumbel(1.96);
    const Copula gg = Copula::survival_of(Copula::survival_of(g));
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) {
            const double u = i / 100.0, v = j / 100.0;
            EXPECT_NEAR(Copula::survival_of(pi)(u, v), pi(u, v), 1e-15);
            EXPECT_NEAR(Copula::survival_of(m)(u, v), m(u, v), 1e-15);
            EXPECT_NEAR(gg(u, v), g(u, v), 1e-14);
        }
    }
}

TEST(Copulas, SurvivalTransformPreservesKendallTau) {
    const Copula g = Copula::gumbel(1.96);
    EXPECT_NEAR(jlrisk::kendalls_tau_numeric(g, 400), jlrisk::kendalls_tau_numeric(Copula::survival_of(g), 400),
                5e-3);
}

TEST(Copulas, GumbelSummaries) {
    const auto s1 = jlrisk::gumbel_summaries(1.0);
    EXPECT_EQ(s1.tau, 0.0);
    EXPECT_EQ(s1.lambda_upper, 0.0);
    EXPECT_EQ(s1.kappa_lower, 2.0);
    const auto s = jlrisk::gumbel_summaries(1.96);
    EXPECT_NEAR(s.tau, 0.48979591836734693878, 1e-15);
    EXPECT_NEAR(s.lambda_upper, 0.57574834599546470917, 1e-15);
    EXPECT_NEAR(s.kappa_lower, 1.4242516540045352908, 1e-15);
    EXPECT_NEAR(jlrisk::gumbel_summaries(1e6).tau, 1.0 - 1e-6, 1e-15);
    EXPECT_THROW(jlrisk::gumbel_summaries(0.5), std::domain_error);
}

TEST(Copulas, TankovEmptyGivesFrechetHoeffding) {
    const auto b = jlrisk::tankov_bounds({}, Copula::independence());
    EXPECT_EQ(b.lower.kind(), jlrisk::CopulaKind::Countermonotone);
    EXPECT_EQ(b.upper.kind(), jlrisk::CopulaKind::Comonotone);
}

TEST(Copulas, TankovMatchesOnFullGrid) {
    std::vector<UnitPoint> grid;
    for (int i = 0; i <= 100; ++i) {
        for (int j = 0; j <= 100; ++j) grid.push_back({i / 100.0, j / 100.0});
    }
    const Copula pi = Copula::independence();
    const auto b = jlrisk::tankov_bounds(grid, pi);
    for (const auto& p : grid) {
        EXPECT_NEAR(b.lower(p), pi(p), kTol);
        EXPECT_NEAR(b.upper(p), pi(p), kTol);
    }
}

TEST(Copulas, TankovBracketsReferenceOnChain) {
    const Copula ref = Copula::survival_of(Copula::gumbel(1.96));
    const auto chain = decreasing_chain();
    std::vector<UnitPoint> inner;
    for (const auto& p : chain) {
        if (p.u >= 0.2 && p.u <= 0.8 && p.v >= 0.2 && p.v <= 0.8) inner.push_back(p);
    }
    ASSERT_FALSE(inner.empty());
    const auto b = jlrisk::tankov_bounds(inner, ref);
    for (const auto& p : chain) {
        EXPECT_LE(b.lower(p), ref(p) + kTol);
        EXPECT_GE(b.upper(p), ref(p) - kTol);
    }
    for (const auto& p : inner) {
        EXPECT_NEAR(b.lower(p), ref(p), kTol);
        EXPECT_NEAR(b.upper(p), ref(p), kTol);
    }
}

TEST(Copulas, TauBandExtremes) {
    for (int i = 0; i <= 50; ++i) {
        for (int j = 0; j <= 50; ++j) {
            const double u = i / 50.0, v = j / 50.0;
            EXPECT_NEAR(Copula::tau_band_lower(1.0)(u, v), std::min(u, v), 1e-15);
            EXPECT_NEAR(Copula::tau_band_upper(1.0)(u, v), std::min(u, v), 1e-15);
            EXPECT_NEAR(Copula::tau_band_lower(-1.0)(u, v), std::max(0.0, u + v - 1.0), 1e-15);
            EXPECT_NEAR(Copula::tau_band_upper(-1.0)(u, v), std::max(0.0, u + v - 1.0), 1e-15);
        }
    }
    EXPECT_THROW(jlrisk::tau_band_bounds(1.5), std::domain_error);
}

TEST(Copulas, TauBandOrdersAroundMembers) {
    // Gumbel(1.96) has tau 0.4898; the band at that tau must contain it.
    const double tau = jlrisk::gumbel_summaries(1.96).tau;
    const auto band = jlrisk::tau_band_bounds(tau);
    const Copula g = Copula::gumbel(1.96);
    const Copula sg = Copula::survival_of(g);
    for (int i = 1; i < 50; ++i) {
        for (int j = 1; j < 50; ++j) {
            const double u = i / 50.0, v = j / 50.0;
            EXPECT_LE(band.lower(u, v), g(u, v) + kTol);
            EXPECT_GE(band.upper(u, v), g(u, v) - kTol);
            EXPECT_LE(band.lower(u, v), sg(u, v) + kTol);
            EXPECT_GE(band.upper(u, v), sg(u, v) - kTol);
        }
    }
}

TEST(Copulas, NumericKendallTau) {
    EXPECT_NEAR(jlrisk::kendalls_tau_numeric(Copula::independence(), 500), 0.0, 5e-3);
    EXPECT_NEAR(jlrisk::kendalls_tau_numeric(Copula::comonotone(), 500), 1.0, 1e-2);
    EXPECT_NEAR(jlrisk::kendalls_tau_numeric(Copula::gumbel(1.96), 500), 0.4898, 5e-3);
    EXPECT_NEAR(jlrisk::kendalls_tau_numeric(Copula::countermonotone(), 500), -1.0, 1e-2);
}
