#pragma once

#include <string>
#include <vector>

#include "jlrisk/copulas.hpp"
#include "jlrisk/marginals.hpp"

namespace jlrisk {

enum class ContractKind {
    JointLifeAnnuity,
    LastSurvivorAnnuity,
    JointLifeInsurance,
    LastSurvivorInsurance,
    ReversionaryAnnuity,
    WidowsPension,
};

std::string to_string(ContractKind kind);
ContractKind parse_contract_kind(const std::string& name);

enum class Statistic { FirstDeath, LastDeath };
enum class Monotonicity { Increasing, Decreasing, NonMonotone };

/// A two-life contract with explicit yearly schedules.
///
/// amounts[k-1] is a_k (annuities, pensions) or b_k (insurances) and
/// discount[k-1] is v_k, for k = 1..n. Payments fall at integer times.
struct Contract {
    ContractKind kind = ContractKind::JointLifeAnnuity;
    std::vector<double> amounts;
    std::vector<double> discount;

    /// Constant level and constant annual rate over n years; v = 1/(1+rate).
    static Contract constant(ContractKind kind, int term, double level, double rate);

    int term() const { return static_cast<int>(amounts.size()); }
    /// amount_k * v_k^k.
    double discounted(int k) const;
    Contract scaled(double factor) const;
    /// Throws std::invalid_argument on negative amounts, v outside (0,1) or size mismatch.
    void validate() const;
};

/// Term for whole-life contracts: ceil of the larger maximum lifetime.
int whole_life_term(const GompertzMarginal& x, const GompertzMarginal& y);

/// L = g(K) for a single curtate statistic K. payoff[k] = g(k) for
/// k = 0..payoff.size()-1; g is constant beyond the last entry.
struct PayoffSpec {
    Statistic statistic = Statistic::FirstDeath;
    std::vector<double> payoff;
    Monotonicity monotonicity = Monotonicity::Increasing;

    double at(long k) const;
};

/// Scans consecutive differences; a constant sequence counts as increasing.
Monotonicity classify(const std::vector<double>& payoff);

/// Payoff sequence of a single-statistic contract. Throws std::invalid_argument
/// for reversionary annuities and widow's pensions.
PayoffSpec payoff_spec(const Contract& contract);

/// price(C) = c0 + sum_m coef[m] * C(points[m]).
struct PriceLinearForm {
    double c0 = 0.0;
    std::vector<double> coef;
    std::vector<UnitPoint> points;

    double evaluate(const Copula& c) const;
};

/// Points are (Fbar(k), Gbar(k)) for k = 1..n.
PriceLinearForm price_linear_form(const Contract& contract, const GompertzMarginal& x,
                                  const GompertzMarginal& y);

/// Level making the independence price of `unit` (a level-1 contract) equal
/// to target_price. Throws std::domain_error when the unit price is zero.
double calibrate_level(const Contract& unit, const GompertzMarginal& x, const GompertzMarginal& y,
                       double target_price);

}  // namespace jlrisk
