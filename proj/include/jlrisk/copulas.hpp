#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace jlrisk {

/// A point of the unit square.
struct UnitPoint {
    double u = 0.0;
    double v = 0.0;
};

enum class CopulaKind {
    Independence,
    Comonotone,
    Countermonotone,
    Gumbel,
    Survival,
    TauBandLower,
    TauBandUpper,
    TankovLower,
    TankovUpper,
};

/// Pointwise-evaluable copula or quasi-copula on [0,1]^2.
///
/// Immutable value type; copies share the underlying definition.
class Copula {
public:
    static Copula independence();
    static Copula comonotone();
    static Copula countermonotone();
    /// Gumbel copula exp(-((-ln u)^d + (-ln v)^d)^(1/d)); throws for delta < 1.
    static Copula gumbel(double delta);
    /// Survival transform u + v - 1 + inner(1 - u, 1 - v).
    static Copula survival_of(const Copula& inner);
    static Copula tau_band_lower(double tau);
    static Copula tau_band_upper(double tau);
    /// Lower bound B over copulas agreeing with q on the given points.
    static Copula tankov_lower(std::vector<UnitPoint> points, const Copula& q);
    /// Upper bound A over copulas agreeing with q on the given points.
    static Copula tankov_upper(std::vector<UnitPoint> points, const Copula& q);

    double operator()(double u, double v) const;
    double operator()(UnitPoint p) const { return (*this)(p.u, p.v); }

    CopulaKind kind() const;
    /// Gumbel parameter (also for survival_of(gumbel)); throws otherwise.
    double delta() const;
    /// Inner copula of a survival transform; throws for other kinds.
    const Copula& inner() const;
    /// True for kinds that are known to be genuine copulas (2-increasing).
    bool is_copula() const;
    std::string describe() const;

    struct Node;

private:
    explicit Copula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

/// Frechet-Hoeffding bounds.
inline double fh_lower(double u, double v) { return u + v - 1.0 > 0.0 ? u + v - 1.0 : 0.0; }
inline double fh_upper(double u, double v) { return u < v ? u : v; }

struct GumbelSummaries {
    double tau = 0.0;
    double lambda_upper = 0.0;
    double kappa_lower = 0.0;
};

/// Closed-form Kendall's tau, upper tail dependence and lower tail order.
GumbelSummaries gumbel_summaries(double delta);

struct CopulaBounds {
    Copula lower;
    Copula upper;
};

/// Bounds over copulas taking the values of q on the given points.
CopulaBounds tankov_bounds(const std::vector<UnitPoint>& points, const Copula& q);

/// Pointwise bounds over the copulas with Kendall's tau equal to tau.
CopulaBounds tau_band_bounds(double tau);

/// Kendall's tau 1 - 4 * int d1C d2C by central differences on an n x n grid.
/// Discretization error is O(1/n).
double kendalls_tau_numeric(const Copula& c, int grid_n);

}  // namespace jlrisk
