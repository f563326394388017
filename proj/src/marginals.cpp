#include "jlrisk/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jlrisk {

GompertzMarginal::GompertzMarginal(double entry_age, double mode, double dispersion,
                                   double max_lifetime)
    : entry_age_(entry_age), mode_(mode), dispersion_(dispersion), max_lifetime_(max_lifetime) {
    if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
        throw std::invalid_argument("GompertzMarginal: dispersion must be positive, got " +
                                    std::to_string(dispersion));
    }
    if (!(max_lifetime > 0.0) || !std::isfinite(max_lifetime)) {
        throw std::invalid_argument("GompertzMarginal: max_lifetime must be positive, got " +
                                    std::to_string(max_lifetime));
    }
    if (!(entry_age >= 0.0) || !std::isfinite(entry_age) || !std::isfinite(mode)) {
        throw std::invalid_argument("GompertzMarginal: entry_age must be >= 0 and mode finite");
    }
    hazard_scale_ = std::exp((entry_age_ - mode_) / dispersion_);
    cdf_at_max_ = untruncated_cdf(max_lifetime_);
    if (!(cdf_at_max_ > 0.0)) {
        throw std::invalid_argument("GompertzMarginal: degenerate law (zero mass before omega)");
    }
}

double GompertzMarginal::untruncated_cdf(double x) const {
    // 1 - exp(c * (1 - e^{x/sigma})) written with expm1 to keep precision near 0.
    return -std::expm1(-hazard_scale_ * std::expm1(x / dispersion_));
}

double GompertzMarginal::survival(double x) const {
    if (x <= 0.0) return 1.0;
    if (x >= max_lifetime_) return 0.0;
    return 1.0 - untruncated_cdf(x) / cdf_at_max_;
}

double GompertzMarginal::quantile_survival(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::domain_error("quantile_survival: probability outside [0, 1]: " +
                                std::to_string(p));
    }
    if (p == 1.0) return 0.0;
    if (p == 0.0) return max_lifetime_;
    // Ftilde(x) = (1 - p) Ftilde(omega)  =>  c (1 - e^{x/sigma}) = log(1 - (1 - p) Ftilde(omega)).
    const double log_term = std::log1p(-(1.0 - p) * cdf_at_max_);
    const double x = dispersion_ * std::log1p(-log_term / hazard_scale_);
    return std::clamp(x, 0.0, max_lifetime_);
}

std::int64_t GompertzMarginal::horizon() const {
    return static_cast<std::int64_t>(std::ceil(max_lifetime_));
}

}  // namespace jlrisk
