#pragma once

#include <cstdint>
#include <vector>

#include "jlrisk/contracts.hpp"
#include "jlrisk/copulas.hpp"
#include "jlrisk/marginals.hpp"

namespace jlrisk {

/// splitmix64 step; used to derive independent per-block seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Draws i.i.d. pairs from Π, M, W, Gumbel or a survival transform of those.
/// Samples are generated in fixed blocks of `kSampleBlock` pairs, each with
/// its own std::mt19937_64 seeded by splitmix64(seed, block), so the stream
/// does not depend on `threads`. Throws std::invalid_argument for
/// quasi-copula bounds.
std::vector<UnitPoint> sample_copula(const Copula& c, std::size_t n, std::uint64_t seed, int threads = 1);

inline constexpr std::size_t kSampleBlock = 1 << 16;

/// Payoff of one contract for each pair (u, v) = (Fbar(X), Gbar(Y)).
std::vector<double> simulate_payoffs(const Contract& contract, const GompertzMarginal& x,
                                     const GompertzMarginal& y, const std::vector<UnitPoint>& samples);

struct EmpiricalMeasures {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;
    double es = 0.0;
    double se_mean = 0.0;
    double se_var = 0.0;
    double se_es = 0.0;
};

/// Plug-in mean, VaR and ES of the empirical law with bootstrap standard errors.
EmpiricalMeasures empirical_measures(const std::vector<double>& payoffs, double alpha_var,
                                     double alpha_es, int resamples = 200, std::uint64_t seed = 1);

/// Concordant minus discordant pairs over all pairs, O(n log n).
double empirical_kendall_tau(std::vector<UnitPoint> samples);

}  // namespace jlrisk
