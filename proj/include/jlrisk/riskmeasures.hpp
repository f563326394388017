#pragma once

#include <string>
#include <utility>
#include <vector>

namespace jlrisk {

enum class MeasureKind { Mean, VaR, ES };

/// Distortion function h with h(0) = 0, h(1) = 1; rho_h(L) = int h(P(L > x)) dx.
class Distortion {
public:
    static Distortion mean() { return Distortion(MeasureKind::Mean, 0.0); }
    /// h(b) = 1{b > 1 - alpha}. Throws for alpha outside (0, 1).
    static Distortion var(double alpha);
    /// h(b) = min(1, b / (1 - alpha)). Throws for alpha outside (0, 1).
    static Distortion es(double alpha);

    double operator()(double beta) const;

    MeasureKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    /// "mean", "var_0.99", "es_0.975".
    std::string name() const;

private:
    Distortion(MeasureKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
    MeasureKind kind_;
    double alpha_;
};

/// Parses the names produced by Distortion::name().
Distortion parse_distortion(const std::string& name);

struct Atom {
    double value = 0.0;
    double prob = 0.0;
};

struct DiscreteMeasures {
    double mean = 0.0;
    double var = 0.0;
    double es = 0.0;
};

/// Mean, VaR (generalized inverse F_L(l) >= alpha) and ES (tail average,
/// splitting the atom at the quantile). Probabilities must be >= 0 and sum
/// to 1 within 1e-12 or std::domain_error is thrown.
DiscreteMeasures measures_from_discrete(std::vector<Atom> atoms, double alpha_var, double alpha_es);

/// int h(P(L > x)) dx for a discrete law with nonnegative support, by summing
/// over the sorted distinct values.
double distortion_integral(std::vector<Atom> atoms, const Distortion& h);

/// Sorts by value and merges equal values.
std::vector<Atom> normalize_atoms(std::vector<Atom> atoms);

}  // namespace jlrisk
