#include "jlrisk/contracts.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jlrisk {

namespace {

struct KindName {
    ContractKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {ContractKind::JointLifeAnnuity, "joint_life_annuity"},
    {ContractKind::LastSurvivorAnnuity, "last_survivor_annuity"},
    {ContractKind::JointLifeInsurance, "joint_life_insurance"},
    {ContractKind::LastSurvivorInsurance, "last_survivor_insurance"},
    {ContractKind::ReversionaryAnnuity, "reversionary_annuity"},
    {ContractKind::WidowsPension, "widows_pension"},
};

}  // namespace

std::string to_string(ContractKind kind) {
    for (const auto& kn : kKindNames) {
        if (kn.kind == kind) return kn.name;
    }
    return "unknown";
}

ContractKind parse_contract_kind(const std::string& name) {
    for (const auto& kn : kKindNames) {
        if (name == kn.name) return kn.kind;
    }
    throw std::invalid_argument("unknown contract kind '" + name + "'");
}

Contract Contract::constant(ContractKind kind, int term, double level, double rate) {
    if (term < 1) throw std::invalid_argument("contract term must be >= 1");
    if (!(rate > 0.0)) throw std::invalid_argument("interest rate must be > 0");
    Contract c;
    c.kind = kind;
    c.amounts.assign(term, level);
    c.discount.assign(term, 1.0 / (1.0 + rate));
    c.validate();
    return c;
}

double Contract::discounted(int k) const {
    return amounts.at(k - 1) * std::pow(discount.at(k - 1), k);
}

Contract Contract::scaled(double factor) const {
    Contract c = *this;
    for (auto& a : c.amounts) a *= factor;
    return c;
}

void Contract::validate() const {
    if (amounts.empty()) throw std::invalid_argument("contract has an empty schedule");
    if (amounts.size() != discount.size()) {
        throw std::invalid_argument("amount and discount schedules differ in length");
    }
    for (std::size_t i = 0; i < amounts.size(); ++i) {
        if (!(amounts[i] >= 0.0)) throw std::invalid_argument("contract amounts must be >= 0");
        if (!(discount[i] > 0.0 && discount[i] < 1.0)) {
            throw std::invalid_argument("discount factors must lie in (0, 1)");
        }
    }
}

int whole_life_term(const GompertzMarginal& x, const GompertzMarginal& y) {
    return static_cast<int>(std::max(x.horizon(), y.horizon()));
}

double PayoffSpec::at(long k) const {
    if (payoff.empty()) return 0.0;
    if (k < 0) k = 0;
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(k), payoff.size() - 1);
    return payoff[i];
}

Monotonicity classify(const std::vector<double>& payoff) {
    bool up = false;
    bool down = false;
    for (std::size_t k = 1; k < payoff.size(); ++k) {
        if (payoff[k] > payoff[k - 1]) up = true;
        if (payoff[k] < payoff[k - 1]) down = true;
    }
    if (up && down) return Monotonicity::NonMonotone;
    return down ? Monotonicity::Decreasing : Monotonicity::Increasing;
}

PayoffSpec payoff_spec(const Contract& contract) {
    contract.validate();
    const int n = contract.term();
    PayoffSpec spec;
    switch (contract.kind) {
        case ContractKind::JointLifeAnnuity:
        case ContractKind::LastSurvivorAnnuity: {
            // l_k = sum_{j <= min(n, k)} a_j v_j^j
            spec.payoff.assign(n + 1, 0.0);
            for (int k = 1; k <= n; ++k) spec.payoff[k] = spec.payoff[k - 1] + contract.discounted(k);
            break;
        }
        case ContractKind::JointLifeInsurance:
        case ContractKind::LastSurvivorInsurance: {
            // l_k = b_m v_m^m with m = min(n, k + 1); the benefit is paid at n at the latest.
            spec.payoff.assign(n, 0.0);
            for (int k = 0; k < n; ++k) spec.payoff[k] = contract.discounted(std::min(n, k + 1));
            break;
        }
        case ContractKind::ReversionaryAnnuity:
        case ContractKind::WidowsPension:
            throw std::invalid_argument(to_string(contract.kind) +
                                        ": no single-statistic payoff, use price_linear_form");
    }
    const bool first = contract.kind == ContractKind::JointLifeAnnuity ||
                       contract.kind == ContractKind::JointLifeInsurance;
    spec.statistic = first ? Statistic::FirstDeath : Statistic::LastDeath;
    spec.monotonicity = classify(spec.payoff);
    return spec;
}

double PriceLinearForm::evaluate(const Copula& c) const {
    double total = c0;
    for (std::size_t m = 0; m < coef.size(); ++m) total += coef[m] * c(points[m]);
    return total;
}

PriceLinearForm price_linear_form(const Contract& contract, const GompertzMarginal& x,
                                  const GompertzMarginal& y) {
    contract.validate();
    const int n = contract.term();
    PriceLinearForm form;
    form.points.reserve(n);
    for (int k = 1; k <= n; ++k) form.points.push_back({x.curtate_survival(k), y.curtate_survival(k)});
    form.coef.assign(n, 0.0);

    switch (contract.kind) {
        case ContractKind::ReversionaryAnnuity:
            for (int k = 1; k <= n; ++k) {
                const double w = contract.discounted(k);
                form.c0 += w * (form.points[k - 1].u + form.points[k - 1].v);
                form.coef[k - 1] = -2.0 * w;
            }
            return form;
        case ContractKind::WidowsPension:
            for (int k = 1; k <= n; ++k) {
                const double w = contract.discounted(k);
                form.c0 += w * form.points[k - 1].u;
                form.coef[k - 1] = -w;
            }
            return form;
        default:
            break;
    }

    // E[g(K)] = g(0) + sum_k (g(k) - g(k-1)) P(K >= k), with P(K_min >= k) = C(u_k, v_k)
    // and P(K_max >= k) = u_k + v_k - C(u_k, v_k).
    const PayoffSpec spec = payoff_spec(contract);
    form.c0 = spec.at(0);
    for (int k = 1; k <= n; ++k) {
        const double delta = spec.at(k) - spec.at(k - 1);
        if (spec.statistic == Statistic::FirstDeath) {
            form.coef[k - 1] = delta;
        } else {
            form.c0 += delta * (form.points[k - 1].u + form.points[k - 1].v);
            form.coef[k - 1] = -delta;
        }
    }
    return form;
}

double calibrate_level(const Contract& unit, const GompertzMarginal& x, const GompertzMarginal& y,
                       double target_price) {
    const double unit_price = price_linear_form(unit, x, y).evaluate(Copula::independence());
    if (!(unit_price != 0.0)) throw std::domain_error("calibration impossible: zero price at unit level");
    return target_price / unit_price;
}

}  // namespace jlrisk
