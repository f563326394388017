#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace jlrisk::lp {

enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded, Failure };

const char* to_string(Status status);

constexpr double kInf = std::numeric_limits<double>::infinity();

/// optimize c.x subject to A x <= b and lower <= x <= upper.
class LinearProgram {
public:
    explicit LinearProgram(std::size_t num_vars, Sense sense = Sense::Minimize);

    void set_sense(Sense sense) { sense_ = sense; }
    void set_objective(std::vector<double> c);
    void set_objective(std::size_t j, double cj);
    /// Throws std::invalid_argument when lo > hi or j is out of range.
    void set_bounds(std::size_t j, double lo, double hi);
    /// Dense row; throws std::invalid_argument on a length mismatch.
    std::size_t add_row(const std::vector<double>& coeffs, double rhs);
    std::size_t add_sparse_row(const std::vector<std::pair<std::size_t, double>>& terms, double rhs);

    std::size_t num_vars() const { return n_; }
    std::size_t num_rows() const { return rhs_.size(); }
    Sense sense() const { return sense_; }
    const std::vector<double>& objective() const { return c_; }
    const double* row(std::size_t i) const { return a_.data() + i * n_; }
    double rhs(std::size_t i) const { return rhs_[i]; }
    void set_rhs(std::size_t i, double b) { rhs_.at(i) = b; }
    const std::vector<double>& lower() const { return lo_; }
    const std::vector<double>& upper() const { return hi_; }

private:
    std::size_t n_;
    Sense sense_;
    std::vector<double> c_;
    std::vector<double> a_;
    std::vector<double> rhs_;
    std::vector<double> lo_;
    std::vector<double> hi_;
};

struct Options {
    double feasibility_tol = 1e-9;
    double optimality_tol = 1e-9;
    double pivot_tol = 1e-9;
    long max_iterations = 100000;
    /// Consecutive degenerate pivots before switching to Bland's rule.
    int degenerate_limit = 30;
    /// Turn single-variable rows into bounds before pivoting.
    bool presolve = true;
};

struct Result {
    Status status = Status::Failure;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x;
    long iterations = 0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau.
/// Deterministic: Dantzig pricing with lowest-index tie breaks, Bland's rule
/// after a run of degenerate pivots. An optimal point that fails the final
/// feasibility check is reported as Status::Failure.
Result solve(const LinearProgram& program, const Options& options = {});

}  // namespace jlrisk::lp
