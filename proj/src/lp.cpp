#include "jlrisk/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jlrisk::lp {

const char* to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::Failure: return "failure";
    }
    return "unknown";
}

LinearProgram::LinearProgram(std::size_t num_vars, Sense sense)
    : n_(num_vars), sense_(sense), c_(num_vars, 0.0), lo_(num_vars, 0.0), hi_(num_vars, kInf) {}

void LinearProgram::set_objective(std::vector<double> c) {
    if (c.size() != n_) throw std::invalid_argument("objective length does not match variable count");
    c_ = std::move(c);
}

void LinearProgram::set_objective(std::size_t j, double cj) { c_.at(j) = cj; }

void LinearProgram::set_bounds(std::size_t j, double lo, double hi) {
    if (j >= n_) throw std::invalid_argument("variable index out of range");
    if (std::isnan(lo) || std::isnan(hi) || lo > hi) throw std::invalid_argument("variable bounds need lo <= hi");
    lo_[j] = lo;
    hi_[j] = hi;
}

std::size_t LinearProgram::add_row(const std::vector<double>& coeffs, double rhs) {
    if (coeffs.size() != n_) throw std::invalid_argument("row length does not match variable count");
    a_.insert(a_.end(), coeffs.begin(), coeffs.end());
    rhs_.push_back(rhs);
    return rhs_.size() - 1;
}

std::size_t LinearProgram::add_sparse_row(const std::vector<std::pair<std::size_t, double>>& terms, double rhs) {
    std::vector<double> dense(n_, 0.0);
    for (const auto& [j, a] : terms) {
        if (j >= n_) throw std::invalid_argument("row references a variable out of range");
        dense[j] += a;
    }
    return add_row(dense, rhs);
}

namespace {

// Column of the internal problem: x_orig = offset + sign * y, y >= 0.
struct Column {
    std::size_t var;
    double sign;
    double offset;
    double range;  // upper bound of y
};

enum class State : unsigned char { Basic, AtLower, AtUpper };

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols, const Options& opt)
        : m_(rows), n_(cols), opt_(opt), t_(rows * cols, 0.0), beta_(rows, 0.0), basis_(rows, 0),
          state_(cols, State::AtLower), hi_(cols, kInf), d_(cols, 0.0) {}

    double* row(std::size_t i) { return t_.data() + i * n_; }
    double& at(std::size_t i, std::size_t j) { return t_[i * n_ + j]; }

    std::size_t m_, n_;
    const Options& opt_;
    std::vector<double> t_;
    std::vector<double> beta_;
    std::vector<std::size_t> basis_;
    std::vector<State> state_;
    std::vector<double> hi_;
    std::vector<double> d_;
    long iterations = 0;

    double value_of(std::size_t j) const { return state_[j] == State::AtUpper ? hi_[j] : 0.0; }

    void price(const std::vector<double>& cost) {
        for (std::size_t j = 0; j < n_; ++j) d_[j] = cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* r = row(i);
            for (std::size_t j = 0; j < n_; ++j) d_[j] -= cb * r[j];
        }
        for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
    }

    void pivot(std::size_t r, std::size_t j) {
        double* pr = row(r);
        const double inv = 1.0 / pr[j];
        for (std::size_t k = 0; k < n_; ++k) pr[k] *= inv;
        pr[j] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* pi = row(i);
            const double f = pi[j];
            if (f == 0.0) continue;
            for (std::size_t k = 0; k < n_; ++k) pi[k] -= f * pr[k];
            pi[j] = 0.0;
        }
        const double f = d_[j];
        if (f != 0.0) {
            for (std::size_t k = 0; k < n_; ++k) d_[k] -= f * pr[k];
            d_[j] = 0.0;
        }
    }

    // Minimizes cost over the current basis; returns Optimal, Unbounded or Failure.
    Status run(const std::vector<double>& cost) {
        price(cost);
        int degenerate = 0;
        while (true) {
            if (iterations >= opt_.max_iterations) return Status::Failure;
            const bool bland = degenerate >= opt_.degenerate_limit;

            std::size_t enter = n_;
            double dir = 0.0;
            double best = 0.0;
            for (std::size_t j = 0; j < n_; ++j) {
                if (state_[j] == State::Basic || hi_[j] <= 0.0) continue;
                double score = 0.0;
                double s = 0.0;
                if (state_[j] == State::AtLower && d_[j] < -opt_.optimality_tol) {
                    score = -d_[j];
                    s = 1.0;
                } else if (state_[j] == State::AtUpper && d_[j] > opt_.optimality_tol) {
                    score = d_[j];
                    s = -1.0;
                } else {
                    continue;
                }
                if (enter == n_ || (!bland && score > best)) {
                    enter = j;
                    dir = s;
                    best = score;
                    if (bland) break;
                }
            }
            if (enter == n_) return Status::Optimal;

            double step = hi_[enter];
            std::size_t leave = m_;
            bool leave_to_upper = false;
            for (std::size_t i = 0; i < m_; ++i) {
                const double alpha = at(i, enter) * dir;
                double limit;
                bool to_upper;
                if (alpha > opt_.pivot_tol) {
                    limit = std::max(0.0, beta_[i]) / alpha;
                    to_upper = false;
                } else if (alpha < -opt_.pivot_tol && std::isfinite(hi_[basis_[i]])) {
                    limit = std::max(0.0, hi_[basis_[i]] - beta_[i]) / -alpha;
                    to_upper = true;
                } else {
                    continue;
                }
                const bool better = limit < step - 1e-12 * (1.0 + step) ||
                                    (limit <= step + 1e-12 * (1.0 + step) && leave != m_ &&
                                     basis_[i] < basis_[leave]);
                if (leave == m_ ? limit <= step : better) {
                    step = std::min(limit, step);
                    leave = i;
                    leave_to_upper = to_upper;
                }
            }
            if (!std::isfinite(step)) return Status::Unbounded;

            ++iterations;
            degenerate = step <= 1e-12 ? degenerate + 1 : 0;
            for (std::size_t i = 0; i < m_; ++i) beta_[i] -= at(i, enter) * dir * step;

            if (leave == m_) {
                state_[enter] = dir > 0 ? State::AtUpper : State::AtLower;
                continue;
            }
            const double entered = value_of(enter) + dir * step;
            const std::size_t out = basis_[leave];
            state_[out] = leave_to_upper ? State::AtUpper : State::AtLower;
            pivot(leave, enter);
            basis_[leave] = enter;
            state_[enter] = State::Basic;
            beta_[leave] = entered;
        }
    }
};

}  // namespace

Result solve(const LinearProgram& program, const Options& opt) {
    const std::size_t n = program.num_vars();
    std::vector<double> lo = program.lower();
    std::vector<double> hi = program.upper();
    const double tol = opt.feasibility_tol;
    Result result;

    // Presolve: empty and single-variable rows.
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < program.num_rows(); ++i) {
        const double* a = program.row(i);
        std::size_t nz = 0;
        std::size_t last = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (a[j] != 0.0) {
                ++nz;
                last = j;
            }
        }
        const double b = program.rhs(i);
        if (!opt.presolve && nz > 0) {
            kept.push_back(i);
        } else if (nz == 0) {
            if (b < -tol * (1.0 + std::abs(b))) {
                result.status = Status::Infeasible;
                return result;
            }
        } else if (nz == 1) {
            const double bound = b / a[last];
            if (a[last] > 0.0) {
                hi[last] = std::min(hi[last], bound);
            } else {
                lo[last] = std::max(lo[last], bound);
            }
        } else {
            kept.push_back(i);
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (lo[j] > hi[j]) {
            if (lo[j] - hi[j] > tol * (1.0 + std::abs(lo[j]))) {
                result.status = Status::Infeasible;
                return result;
            }
            hi[j] = lo[j];
        }
    }

    // Substitute every variable by nonnegative columns.
    std::vector<Column> cols;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::isfinite(lo[j])) {
            cols.push_back({j, 1.0, lo[j], hi[j] - lo[j]});
        } else if (std::isfinite(hi[j])) {
            cols.push_back({j, -1.0, hi[j], kInf});
        } else {
            cols.push_back({j, 1.0, 0.0, kInf});
            cols.push_back({j, -1.0, 0.0, kInf});
        }
    }
    const std::size_t ny = cols.size();
    const std::size_t m = kept.size();
    // Value of x when every column sits at zero.
    std::vector<double> base(n, 0.0);
    for (std::size_t k = ny; k-- > 0;) base[cols[k].var] = cols[k].offset;

    std::vector<double> resid(m);
    std::size_t nart = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = program.row(kept[i]);
        double r = program.rhs(kept[i]);
        for (std::size_t j = 0; j < n; ++j) r -= a[j] * base[j];
        resid[i] = r;
        if (r < 0.0) ++nart;
    }

    const std::size_t ncols = ny + m + nart;
    Tableau tab(m, ncols, opt);
    std::size_t art = ny + m;
    for (std::size_t i = 0; i < m; ++i) {
        const double* a = program.row(kept[i]);
        const double s = resid[i] < 0.0 ? -1.0 : 1.0;
        double* t = tab.row(i);
        for (std::size_t k = 0; k < ny; ++k) t[k] = s * a[cols[k].var] * cols[k].sign;
        t[ny + i] = s;
        if (s < 0.0) {
            t[art] = 1.0;
            tab.basis_[i] = art;
            ++art;
        } else {
            tab.basis_[i] = ny + i;
        }
        tab.beta_[i] = s * resid[i];
        tab.state_[tab.basis_[i]] = State::Basic;
    }
    for (std::size_t k = 0; k < ny; ++k) tab.hi_[k] = cols[k].range;

    if (nart > 0) {
        std::vector<double> cost(ncols, 0.0);
        for (std::size_t k = ny + m; k < ncols; ++k) cost[k] = 1.0;
        const Status s = tab.run(cost);
        if (s != Status::Optimal) {
            result.status = Status::Failure;
            result.iterations = tab.iterations;
            return result;
        }
        double infeas = 0.0;
        double scale = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            scale = std::max(scale, std::abs(resid[i]));
            if (tab.basis_[i] >= ny + m) infeas += tab.beta_[i];
        }
        if (infeas > tol * scale) {
            result.status = Status::Infeasible;
            result.iterations = tab.iterations;
            return result;
        }
        for (std::size_t k = ny + m; k < ncols; ++k) tab.hi_[k] = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (tab.basis_[i] >= ny + m) tab.beta_[i] = 0.0;
        }
    }

    const double sense = program.sense() == Sense::Maximize ? -1.0 : 1.0;
    std::vector<double> cost(ncols, 0.0);
    for (std::size_t k = 0; k < ny; ++k) cost[k] = sense * program.objective()[cols[k].var] * cols[k].sign;
    const Status s = tab.run(cost);
    result.iterations = tab.iterations;
    if (s != Status::Optimal) {
        result.status = s;
        return result;
    }

    std::vector<double> y(ncols, 0.0);
    for (std::size_t k = 0; k < ncols; ++k) y[k] = tab.value_of(k);
    for (std::size_t i = 0; i < m; ++i) y[tab.basis_[i]] = tab.beta_[i];
    std::vector<double> x(n, 0.0);
    std::vector<bool> offset_done(n, false);
    for (std::size_t k = 0; k < ny; ++k) {
        const auto& c = cols[k];
        if (!offset_done[c.var]) {
            x[c.var] += c.offset;
            offset_done[c.var] = true;
        }
        x[c.var] += c.sign * y[k];
    }

    // Clip round-off at the bounds, then verify against the original program.
    for (std::size_t j = 0; j < n; ++j) {
        const double slack = tol * (1.0 + std::abs(x[j]));
        if (x[j] < program.lower()[j]) {
            if (x[j] < program.lower()[j] - slack) {
                result.status = Status::Failure;
                return result;
            }
            x[j] = program.lower()[j];
        }
        if (x[j] > program.upper()[j]) {
            if (x[j] > program.upper()[j] + slack) {
                result.status = Status::Failure;
                return result;
            }
            x[j] = program.upper()[j];
        }
    }
    for (std::size_t i = 0; i < program.num_rows(); ++i) {
        const double* a = program.row(i);
        double lhs = 0.0;
        double mag = std::abs(program.rhs(i));
        for (std::size_t j = 0; j < n; ++j) {
            lhs += a[j] * x[j];
            mag = std::max(mag, std::abs(a[j] * x[j]));
        }
        if (lhs > program.rhs(i) + tol * (1.0 + mag)) {
            result.status = Status::Failure;
            return result;
        }
    }
    double value = 0.0;
    for (std::size_t j = 0; j < n; ++j) value += program.objective()[j] * x[j];
    result.status = Status::Optimal;
    result.value = value;
    result.x = std::move(x);
    return result;
}

}  // namespace jlrisk::lp
