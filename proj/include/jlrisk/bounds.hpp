#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jlrisk/canonical.hpp"
#include "jlrisk/contracts.hpp"
#include "jlrisk/copulas.hpp"
#include "jlrisk/lp.hpp"
#include "jlrisk/riskmeasures.hpp"

namespace jlrisk {

enum class Norm { L1, Linf };

std::string to_string(Norm norm);
Norm parse_norm(const std::string& name);

/// Raised when the LP backend reports a numerical failure.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Values r = A + B * theta of the copula on a decreasing chain of points,
/// restricted to what some copula can attain and to a norm ball around the
/// reference copula.
///
/// The program works in theta (the copula values) with rows
///   theta_{m+1} - theta_m <= 0                               (m̄ - 1 rows)
///   theta_m - theta_{m+1} <= (u_m + v_m) - (u_{m+1} + v_{m+1})  (m̄ - 1 rows)
///   W(u_m, v_m) <= theta_m <= M(u_m, v_m)                    (2 m̄ rows)
/// and the ball ||theta - theta_ref|| <= eps: 2 m̄ box rows for Linf, or
/// 2 m̄ + 1 rows over m̄ extra variables s for L1.
class FeasibleRegion {
public:
    FeasibleRegion(std::vector<UnitPoint> points, std::vector<double> A, std::vector<double> B,
                   const Copula& c_ref, Norm norm, double eps);
    /// No ball: the region of all attainable copula values.
    FeasibleRegion(std::vector<UnitPoint> points, const Copula& c_ref);

    std::size_t size() const { return points_.size(); }
    Norm norm() const { return norm_; }
    double epsilon() const { return eps_; }
    bool has_ball() const { return has_ball_; }
    const std::vector<UnitPoint>& points() const { return points_; }
    const std::vector<double>& r_ref() const { return r_ref_; }
    const std::vector<double>& theta_ref() const { return theta_ref_; }
    const lp::LinearProgram& program() const { return program_; }

    /// Bound on a single coordinate r_m, or nothing when a slice is empty.
    struct RBound {
        std::size_t m;
        bool at_least;  // r_m >= value, otherwise r_m <= value
        double value;
    };

    struct Optimum {
        lp::Status status = lp::Status::Failure;
        double value = 0.0;  // sum_m w_m r_m
        std::vector<double> r;
    };

    /// Optimizes sum_m w_m r_m, optionally with extra coordinate bounds.
    /// Throws SolverError on numerical failure.
    Optimum optimize(const std::vector<double>& w, lp::Sense sense,
                     const std::vector<RBound>& extra = {}) const;

    /// max / min of r_m over the region, memoized.
    double r_max(std::size_t m) const;
    double r_min(std::size_t m) const;

    const lp::Options& options() const { return options_; }
    void set_options(const lp::Options& o) { options_ = o; }

private:
    void assemble(const Copula& c_ref);
    double coordinate(std::size_t m, lp::Sense sense) const;

    std::vector<UnitPoint> points_;
    std::vector<double> A_;
    std::vector<double> B_;
    Norm norm_ = Norm::Linf;
    double eps_ = 0.0;
    bool has_ball_ = true;
    std::vector<double> theta_ref_;
    std::vector<double> r_ref_;
    lp::LinearProgram program_{0};
    lp::Options options_;
    mutable std::vector<std::optional<double>> max_cache_;
    mutable std::vector<std::optional<double>> min_cache_;
};

/// Region of a canonical form. Throws std::domain_error for eps < 0.
FeasibleRegion build_region(const CanonicalForm& form, const Copula& c_ref, Norm norm, double eps);

struct BoundResult {
    std::string measure;
    double epsilon = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    /// Attaining r-vectors where available (mean and ES).
    std::vector<double> r_lower;
    std::vector<double> r_upper;
};

BoundResult mean_bounds(const FeasibleRegion& region, const CanonicalForm& form);
BoundResult var_bounds(const FeasibleRegion& region, const CanonicalForm& form, double alpha);
BoundResult es_bounds(const FeasibleRegion& region, const CanonicalForm& form, double alpha);
/// Dispatches on the distortion kind.
BoundResult risk_bounds(const FeasibleRegion& region, const CanonicalForm& form, const Distortion& h);

/// Mean bounds for a copula-linear price with coefficients of either sign.
BoundResult mean_bounds_linear(const PriceLinearForm& plf, const Copula& c_ref, Norm norm, double eps);

struct EpsilonMax {
    double value = 0.0;
    bool is_exact = false;
    /// Largest distance of each coordinate from the reference.
    std::vector<double> per_point;
};

/// Largest distance from the reference over all attainable copula values:
/// exact for Linf, an upper bound (sum of coordinate maxima) for L1.
EpsilonMax epsilon_max(const std::vector<UnitPoint>& points, const Copula& c_ref, Norm norm);

/// Distance between two copulas on the points.
double copula_distance(const std::vector<UnitPoint>& points, const Copula& a, const Copula& b, Norm norm);

/// Largest distance of a candidate from the reference. Throws std::domain_error when empty.
double epsilon_for_family(const std::vector<Copula>& candidates, const Copula& c_ref,
                          const std::vector<UnitPoint>& points, Norm norm);

/// Rows ordered by epsilon, then by measure. Grid points are evaluated on up
/// to `threads` workers; the output does not depend on the thread count.
std::vector<BoundResult> sweep(const CanonicalForm& form, const Copula& c_ref, Norm norm,
                               const std::vector<double>& eps_grid,
                               const std::vector<Distortion>& measures, int threads = 1);

/// 0 followed by points-1 log-spaced values from 1e-4 * eps_max to eps_max.
std::vector<double> default_epsilon_grid(double eps_max, int points);

/// (A_m + B_m * c(u_m, v_m)) for m = 1..m̄.
std::vector<double> r_curve(const CanonicalForm& form, const Copula& c);

}  // namespace jlrisk
