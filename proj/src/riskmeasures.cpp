#include "jlrisk/riskmeasures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace jlrisk {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("confidence level must lie in (0, 1)");
}

}  // namespace

Distortion Distortion::var(double alpha) {
    check_alpha(alpha);
    return Distortion(MeasureKind::VaR, alpha);
}

Distortion Distortion::es(double alpha) {
    check_alpha(alpha);
    return Distortion(MeasureKind::ES, alpha);
}

double Distortion::operator()(double beta) const {
    switch (kind_) {
        case MeasureKind::Mean:
            return beta;
        case MeasureKind::VaR:
            return beta > 1.0 - alpha_ ? 1.0 : 0.0;
        case MeasureKind::ES:
            return std::min(1.0, beta / (1.0 - alpha_));
    }
    return 0.0;
}

std::string Distortion::name() const {
    if (kind_ == MeasureKind::Mean) return "mean";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%.12g", kind_ == MeasureKind::VaR ? "var" : "es", alpha_);
    return buf;
}

Distortion parse_distortion(const std::string& name) {
    if (name == "mean") return Distortion::mean();
    const auto pos = name.find('_');
    if (pos != std::string::npos) {
        const std::string head = name.substr(0, pos);
        const std::string tail = name.substr(pos + 1);
        char* end = nullptr;
        const double alpha = std::strtod(tail.c_str(), &end);
        if (end != tail.c_str() && *end == '\0') {
            if (head == "var") return Distortion::var(alpha);
            if (head == "es") return Distortion::es(alpha);
        }
    }
    throw std::invalid_argument("unknown risk measure '" + name + "'");
}

std::vector<Atom> normalize_atoms(std::vector<Atom> atoms) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> out;
    for (const auto& a : atoms) {
        if (!out.empty() && out.back().value == a.value) {
            out.back().prob += a.prob;
        } else {
            out.push_back(a);
        }
    }
    return out;
}

double distortion_integral(std::vector<Atom> atoms, const Distortion& h) {
    atoms = normalize_atoms(std::move(atoms));
    // P(L > x) is constant on [x_{i-1}, x_i) and equals the mass at or above x_i.
    double tail = 0.0;
    for (const auto& a : atoms) tail += a.prob;
    double total = 0.0;
    double prev = 0.0;
    for (const auto& a : atoms) {
        total += (a.value - prev) * h(std::clamp(tail, 0.0, 1.0));
        tail -= a.prob;
        prev = a.value;
    }
    return total;
}

DiscreteMeasures measures_from_discrete(std::vector<Atom> atoms, double alpha_var, double alpha_es) {
    check_alpha(alpha_var);
    check_alpha(alpha_es);
    if (atoms.empty()) throw std::domain_error("measures_from_discrete: empty law");
    double sum = 0.0;
    for (const auto& a : atoms) {
        if (!(a.prob >= 0.0)) throw std::domain_error("measures_from_discrete: negative probability");
        sum += a.prob;
    }
    // Rounding in the sum grows with the number of atoms.
    if (std::abs(sum - 1.0) > 1e-12 + 4.0 * static_cast<double>(atoms.size()) * std::numeric_limits<double>::epsilon()) {
        throw std::domain_error("measures_from_discrete: probabilities do not sum to 1");
    }
    atoms = normalize_atoms(std::move(atoms));

    DiscreteMeasures out;
    for (const auto& a : atoms) out.mean += a.value * a.prob;

    auto quantile = [&](double alpha) {
        double cdf = 0.0;
        for (const auto& a : atoms) {
            cdf += a.prob;
            if (cdf >= alpha) return a.value;
        }
        return atoms.back().value;
    };
    out.var = quantile(alpha_var);

    const double q = quantile(alpha_es);
    double excess = 0.0;
    for (const auto& a : atoms) {
        if (a.value > q) excess += (a.value - q) * a.prob;
    }
    out.es = q + excess / (1.0 - alpha_es);
    return out;
}

}  // namespace jlrisk
