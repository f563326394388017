#pragma once

#include <cstdint>

namespace jlrisk {

/// Gompertz lifetime law truncated at a maximum remaining lifetime.
///
/// Lifetimes are measured in years from the start of the contract. With
/// c = exp((t - m) / sigma), the untruncated cdf is
///   Ftilde(x) = 1 - exp(c * (1 - exp(x / sigma))),
/// and the truncated cdf is F(x) = Ftilde(x) / Ftilde(omega) on [0, omega].
class GompertzMarginal {
public:
    GompertzMarginal(double entry_age, double mode, double dispersion, double max_lifetime);

    double entry_age() const { return entry_age_; }
    double mode() const { return mode_; }
    double dispersion() const { return dispersion_; }
    double max_lifetime() const { return max_lifetime_; }

    /// P(X > x); clamps to 1 below zero and to 0 above the maximum lifetime.
    double survival(double x) const;

    /// The x in [0, omega] with survival(x) = p. Throws std::domain_error
    /// for p outside [0, 1].
    double quantile_survival(double p) const;

    double curtate_survival(std::int64_t k) const { return survival(static_cast<double>(k)); }

    /// Smallest integer k with survival(k) = 0, i.e. ceil(omega).
    std::int64_t horizon() const;

private:
    double untruncated_cdf(double x) const;

    double entry_age_;
    double mode_;
    double dispersion_;
    double max_lifetime_;
    double hazard_scale_;   // exp((t - m) / sigma)
    double cdf_at_max_;     // Ftilde(omega)
};

}  // namespace jlrisk
