#pragma once

#include <vector>

#include "jlrisk/contracts.hpp"
#include "jlrisk/copulas.hpp"
#include "jlrisk/marginals.hpp"
#include "jlrisk/riskmeasures.hpp"

namespace jlrisk {

/// rho_h(C) = z0 + sum_m z[m] * h(A[m] + B[m] * C(points[m])).
///
/// Points are nonincreasing in both coordinates. B is +1 or -1 and
/// (A, B) is one of (0, +1), (u+v, -1), (1, -1), (1-u-v, +1) according to
/// the payoff direction and the statistic.
struct CanonicalForm {
    double z0 = 0.0;
    std::vector<double> z;
    std::vector<UnitPoint> points;
    std::vector<double> A;
    std::vector<double> B;
    /// Year k at which the payoff moves to its m-th level.
    std::vector<long> knots;
    Statistic statistic = Statistic::FirstDeath;
    bool increasing = true;

    std::size_t size() const { return z.size(); }
    double weight_sum() const;
    double r_at(std::size_t m, double c) const { return A[m] + B[m] * c; }
    /// Inverse of r_at: the copula value giving r.
    double theta_at(std::size_t m, double r) const { return (r - A[m]) / B[m]; }
};

/// Affine coefficients (A, B) for one point.
void affine_coefficients(bool increasing, Statistic statistic, UnitPoint p, double& a, double& b);

/// Assembles a form from raw data, filling A and B from the direction and
/// statistic. Used for synthetic instances.
CanonicalForm make_form(bool increasing, Statistic statistic, double z0, std::vector<double> z,
                        std::vector<UnitPoint> points);

/// Throws std::invalid_argument for non-monotone payoffs.
CanonicalForm build_canonical(const PayoffSpec& spec, const GompertzMarginal& x,
                              const GompertzMarginal& y);

double evaluate(const CanonicalForm& form, const Distortion& h, const Copula& c);

/// z0 + sum_m z[m] * h(r[m]).
double evaluate_r(const CanonicalForm& form, const Distortion& h, const std::vector<double>& r);

/// Exact law of K from the copula, then int h(P(L > x)) dx over the payoff levels.
double direct_risk_oracle(const PayoffSpec& spec, const GompertzMarginal& x,
                          const GompertzMarginal& y, const Copula& c, const Distortion& h);

/// Atoms (payoff, probability) of L = g(K) under copula c.
std::vector<Atom> payoff_law(const PayoffSpec& spec, const GompertzMarginal& x,
                             const GompertzMarginal& y, const Copula& c);

}  // namespace jlrisk
