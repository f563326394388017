#include "jlrisk/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jlrisk {

namespace {

constexpr double kZero = 1e-15;

bool truncated(Statistic s, UnitPoint p) {
    const bool u0 = p.u <= kZero;
    const bool v0 = p.v <= kZero;
    return s == Statistic::FirstDeath ? (u0 || v0) : (u0 && v0);
}

}  // namespace

double CanonicalForm::weight_sum() const {
    double s = 0.0;
    for (double w : z) s += w;
    return s;
}

void affine_coefficients(bool increasing, Statistic statistic, UnitPoint p, double& a, double& b) {
    const bool first = statistic == Statistic::FirstDeath;
    if (increasing) {
        a = first ? 0.0 : p.u + p.v;
        b = first ? 1.0 : -1.0;
    } else {
        a = first ? 1.0 : 1.0 - p.u - p.v;
        b = first ? -1.0 : 1.0;
    }
}

CanonicalForm make_form(bool increasing, Statistic statistic, double z0, std::vector<double> z,
                        std::vector<UnitPoint> points) {
    if (z.size() != points.size()) throw std::invalid_argument("make_form: size mismatch");
    CanonicalForm f;
    f.increasing = increasing;
    f.statistic = statistic;
    f.z0 = z0;
    f.z = std::move(z);
    f.points = std::move(points);
    f.A.resize(f.size());
    f.B.resize(f.size());
    f.knots.resize(f.size());
    for (std::size_t m = 0; m < f.size(); ++m) {
        affine_coefficients(increasing, statistic, f.points[m], f.A[m], f.B[m]);
        f.knots[m] = static_cast<long>(m + 1);
    }
    return f;
}

CanonicalForm build_canonical(const PayoffSpec& spec, const GompertzMarginal& x,
                              const GompertzMarginal& y) {
    if (spec.monotonicity == Monotonicity::NonMonotone || classify(spec.payoff) != spec.monotonicity) {
        throw std::invalid_argument("canonical form requires a monotone payoff");
    }
    CanonicalForm f;
    f.statistic = spec.statistic;
    f.increasing = spec.monotonicity == Monotonicity::Increasing;

    // Level transitions: first index of each new plateau.
    std::vector<long> knots;
    std::vector<double> steps;
    for (std::size_t k = 1; k < spec.payoff.size(); ++k) {
        if (spec.payoff[k] != spec.payoff[k - 1]) {
            knots.push_back(static_cast<long>(k));
            steps.push_back(std::abs(spec.payoff[k] - spec.payoff[k - 1]));
        }
    }
    f.z0 = f.increasing ? spec.payoff.front() : spec.payoff.back();

    for (std::size_t m = 0; m < knots.size(); ++m) {
        const UnitPoint p{x.curtate_survival(knots[m]), y.curtate_survival(knots[m])};
        if (truncated(spec.statistic, p)) {
            // P(K >= knot) = 0 from here on: h(0) = 0 drops increasing terms,
            // h(1) = 1 turns decreasing terms into constants.
            if (!f.increasing) {
                for (std::size_t j = m; j < knots.size(); ++j) f.z0 += steps[j];
            }
            break;
        }
        double a = 0.0;
        double b = 0.0;
        affine_coefficients(f.increasing, spec.statistic, p, a, b);
        f.z.push_back(steps[m]);
        f.points.push_back(p);
        f.A.push_back(a);
        f.B.push_back(b);
        f.knots.push_back(knots[m]);
    }
    return f;
}

double evaluate_r(const CanonicalForm& form, const Distortion& h, const std::vector<double>& r) {
    double total = form.z0;
    for (std::size_t m = 0; m < form.size(); ++m) total += form.z[m] * h(std::clamp(r[m], 0.0, 1.0));
    return total;
}

double evaluate(const CanonicalForm& form, const Distortion& h, const Copula& c) {
    std::vector<double> r(form.size());
    for (std::size_t m = 0; m < form.size(); ++m) r[m] = form.r_at(m, c(form.points[m]));
    return evaluate_r(form, h, r);
}

std::vector<Atom> payoff_law(const PayoffSpec& spec, const GompertzMarginal& x,
                             const GompertzMarginal& y, const Copula& c) {
    const long horizon = std::max(x.horizon(), y.horizon());
    auto tail = [&](long k) {
        // P(K >= k)
        if (k <= 0) return 1.0;
        const double u = x.curtate_survival(k);
        const double v = y.curtate_survival(k);
        const double both = c(u, v);
        return spec.statistic == Statistic::FirstDeath ? both : u + v - both;
    };
    std::vector<Atom> atoms;
    atoms.reserve(horizon + 1);
    for (long k = 0; k <= horizon; ++k) atoms.push_back({spec.at(k), tail(k) - tail(k + 1)});
    return atoms;
}

double direct_risk_oracle(const PayoffSpec& spec, const GompertzMarginal& x,
                          const GompertzMarginal& y, const Copula& c, const Distortion& h) {
    return distortion_integral(payoff_law(spec, x, y, c), h);
}

}  // namespace jlrisk
