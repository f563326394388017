#include "jlrisk/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace jlrisk {

namespace {

// Tolerance on LP optima when comparing with 1 - alpha.
constexpr double kLevelTol = 1e-9;

}  // namespace

std::string to_string(Norm norm) { return norm == Norm::L1 ? "l1" : "linf"; }

Norm parse_norm(const std::string& name) {
    if (name == "l1" || name == "L1") return Norm::L1;
    if (name == "linf" || name == "Linf" || name == "LINF") return Norm::Linf;
    throw std::invalid_argument("unknown norm '" + name + "' (expected l1 or linf)");
}

FeasibleRegion::FeasibleRegion(std::vector<UnitPoint> points, std::vector<double> A,
                               std::vector<double> B, const Copula& c_ref, Norm norm, double eps)
    : points_(std::move(points)), A_(std::move(A)), B_(std::move(B)), norm_(norm), eps_(eps) {
    if (!(eps >= 0.0)) throw std::domain_error("uncertainty radius must be >= 0");
    if (A_.size() != points_.size() || B_.size() != points_.size()) {
        throw std::invalid_argument("region: coefficient and point counts differ");
    }
    assemble(c_ref);
}

FeasibleRegion::FeasibleRegion(std::vector<UnitPoint> points, const Copula& c_ref)
    : points_(std::move(points)), has_ball_(false) {
    A_.assign(points_.size(), 0.0);
    B_.assign(points_.size(), 1.0);
    assemble(c_ref);
}

void FeasibleRegion::assemble(const Copula& c_ref) {
    const std::size_t n = points_.size();
    for (std::size_t m = 1; m < n; ++m) {
        if (points_[m].u > points_[m - 1].u || points_[m].v > points_[m - 1].v) {
            throw std::invalid_argument("region: points must be nonincreasing in both coordinates");
        }
    }
    theta_ref_.resize(n);
    r_ref_.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        theta_ref_[m] = c_ref(points_[m]);
        r_ref_[m] = A_[m] + B_[m] * theta_ref_[m];
    }
    max_cache_.assign(n, std::nullopt);
    min_cache_.assign(n, std::nullopt);

    const bool l1 = has_ball_ && norm_ == Norm::L1;
    program_ = lp::LinearProgram(l1 ? 2 * n : n);
    for (std::size_t m = 0; m + 1 < n; ++m) program_.add_sparse_row({{m + 1, 1.0}, {m, -1.0}}, 0.0);
    for (std::size_t m = 0; m + 1 < n; ++m) {
        const double gap = (points_[m].u + points_[m].v) - (points_[m + 1].u + points_[m + 1].v);
        program_.add_sparse_row({{m, 1.0}, {m + 1, -1.0}}, gap);
    }
    for (std::size_t m = 0; m < n; ++m) {
        program_.add_sparse_row({{m, 1.0}}, fh_upper(points_[m].u, points_[m].v));
        program_.add_sparse_row({{m, -1.0}}, -fh_lower(points_[m].u, points_[m].v));
    }
    if (!has_ball_) return;
    if (l1) {
        std::vector<std::pair<std::size_t, double>> total;
        for (std::size_t m = 0; m < n; ++m) {
            program_.add_sparse_row({{m, 1.0}, {n + m, -1.0}}, theta_ref_[m]);
            program_.add_sparse_row({{m, -1.0}, {n + m, -1.0}}, -theta_ref_[m]);
            total.push_back({n + m, 1.0});
        }
        program_.add_sparse_row(total, eps_);
    } else {
        for (std::size_t m = 0; m < n; ++m) {
            program_.add_sparse_row({{m, 1.0}}, theta_ref_[m] + eps_);
            program_.add_sparse_row({{m, -1.0}}, eps_ - theta_ref_[m]);
        }
    }
}

FeasibleRegion::Optimum FeasibleRegion::optimize(const std::vector<double>& w, lp::Sense sense,
                                                 const std::vector<RBound>& extra) const {
    const std::size_t n = size();
    Optimum out;
    if (n == 0) {
        out.status = lp::Status::Optimal;
        return out;
    }
    lp::LinearProgram p = program_;
    p.set_sense(sense);
    double constant = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        p.set_objective(m, w[m] * B_[m]);
        constant += w[m] * A_[m];
    }
    for (const auto& e : extra) {
        // A + B theta >= c  <=>  -B theta <= A - c
        const double s = e.at_least ? -1.0 : 1.0;
        p.add_sparse_row({{e.m, s * B_[e.m]}}, s * (e.value - A_[e.m]));
    }
    const lp::Result res = lp::solve(p, options_);
    out.status = res.status;
    if (res.status == lp::Status::Failure || res.status == lp::Status::Unbounded) {
        throw SolverError(std::string("LP over the ") + to_string(norm_) + " region (eps=" +
                          std::to_string(eps_) + ", size " + std::to_string(n) + ") returned " +
                          lp::to_string(res.status));
    }
    if (res.status != lp::Status::Optimal) return out;
    out.r.resize(n);
    for (std::size_t m = 0; m < n; ++m) out.r[m] = std::clamp(A_[m] + B_[m] * res.x[m], 0.0, 1.0);
    out.value = constant + res.value;
    return out;
}

double FeasibleRegion::coordinate(std::size_t m, lp::Sense sense) const {
    std::vector<double> w(size(), 0.0);
    w[m] = 1.0;
    const Optimum o = optimize(w, sense);
    if (o.status != lp::Status::Optimal) {
        throw SolverError("coordinate LP on a region that should be nonempty was " +
                          std::string(lp::to_string(o.status)));
    }
    return o.value;
}

double FeasibleRegion::r_max(std::size_t m) const {
    if (!max_cache_.at(m)) max_cache_[m] = coordinate(m, lp::Sense::Maximize);
    return *max_cache_[m];
}

double FeasibleRegion::r_min(std::size_t m) const {
    if (!min_cache_.at(m)) min_cache_[m] = coordinate(m, lp::Sense::Minimize);
    return *min_cache_[m];
}

FeasibleRegion build_region(const CanonicalForm& form, const Copula& c_ref, Norm norm, double eps) {
    return FeasibleRegion(form.points, form.A, form.B, c_ref, norm, eps);
}

BoundResult mean_bounds(const FeasibleRegion& region, const CanonicalForm& form) {
    BoundResult out;
    out.measure = "mean";
    out.epsilon = region.epsilon();
    const auto lo = region.optimize(form.z, lp::Sense::Minimize);
    const auto hi = region.optimize(form.z, lp::Sense::Maximize);
    if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal) {
        throw SolverError("mean bounds: region reported empty");
    }
    out.lower = form.z0 + lo.value;
    out.upper = form.z0 + hi.value;
    out.r_lower = lo.r;
    out.r_upper = hi.r;
    return out;
}

namespace {

// Number of leading indices in [0, n) where pred holds, assuming pred is
// true on a prefix. Probed values must move monotonically in `direction`
// (-1 nonincreasing, +1 nondecreasing); otherwise returns nullopt.
std::optional<std::size_t> prefix_count(std::size_t n, const std::function<double(std::size_t)>& value,
                                        const std::function<bool(double)>& pred, int direction) {
    std::vector<std::pair<std::size_t, double>> probes;
    std::size_t lo = 0;
    std::size_t hi = n;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        const double x = value(mid);
        probes.push_back({mid, x});
        if (pred(x)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    std::sort(probes.begin(), probes.end());
    for (std::size_t i = 1; i < probes.size(); ++i) {
        const double step = (probes[i].second - probes[i - 1].second) * direction;
        if (step < -kLevelTol) return std::nullopt;
    }
    return lo;
}

double sum_z(const CanonicalForm& form, std::size_t begin, std::size_t end) {
    // z[begin..end) in 0-based storage
    double s = 0.0;
    for (std::size_t i = begin; i < end && i < form.size(); ++i) s += form.z[i];
    return s;
}

}  // namespace

BoundResult var_bounds(const FeasibleRegion& region, const CanonicalForm& form, double alpha) {
    const Distortion h = Distortion::var(alpha);
    BoundResult out;
    out.measure = h.name();
    out.epsilon = region.epsilon();
    const std::size_t n = form.size();
    if (n == 0) {
        out.lower = out.upper = form.z0;
        return out;
    }
    const double level = 1.0 - alpha;
    auto exceeds = [level](double r) { return r > level + kLevelTol; };
    auto rmin = [&](std::size_t m) { return region.r_min(m); };
    auto rmax = [&](std::size_t m) { return region.r_max(m); };

    if (form.increasing) {
        // r is nonincreasing in m: exceeds() holds on a prefix.
        // m_L = first m with r_min <= 1 - alpha; m_U = last m with r_max > 1 - alpha.
        std::size_t m_lower = n + 1;
        {
            auto c = prefix_count(n, rmin, exceeds, -1);
            if (c) {
                m_lower = *c + 1;
            } else {
                for (std::size_t m = 0; m < n; ++m) {
                    if (!exceeds(rmin(m))) {
                        m_lower = m + 1;
                        break;
                    }
                }
            }
        }
        std::size_t m_upper = 0;
        {
            auto c = prefix_count(n, rmax, exceeds, -1);
            if (c) {
                m_upper = *c;
            } else {
                for (std::size_t m = n; m-- > 0;) {
                    if (exceeds(rmax(m))) {
                        m_upper = m + 1;
                        break;
                    }
                }
            }
        }
        out.lower = form.z0 + sum_z(form, 0, m_lower - 1);
        out.upper = form.z0 + sum_z(form, 0, m_upper);
    } else {
        // r is nondecreasing in m: !exceeds() holds on a prefix.
        auto below = [&](double r) { return !exceeds(r); };
        // m_L = last m with r_min <= 1 - alpha; m_U = first m with r_max > 1 - alpha.
        std::size_t m_lower = 0;
        if (auto c = prefix_count(n, rmin, below, +1)) {
            m_lower = *c;
        } else {
            for (std::size_t m = n; m-- > 0;) {
                if (below(rmin(m))) {
                    m_lower = m + 1;
                    break;
                }
            }
        }
        std::size_t m_upper = n + 1;
        if (auto c = prefix_count(n, rmax, below, +1)) {
            m_upper = *c + 1;
        } else {
            for (std::size_t m = 0; m < n; ++m) {
                if (exceeds(rmax(m))) {
                    m_upper = m + 1;
                    break;
                }
            }
        }
        out.lower = form.z0 + sum_z(form, m_lower, n);
        out.upper = form.z0 + sum_z(form, m_upper - 1, n);
    }
    return out;
}

BoundResult es_bounds(const FeasibleRegion& region, const CanonicalForm& form, double alpha) {
    const Distortion h = Distortion::es(alpha);
    BoundResult out;
    out.measure = h.name();
    out.epsilon = region.epsilon();
    const std::size_t n = form.size();
    if (n == 0) {
        out.lower = out.upper = form.z0;
        return out;
    }
    const double level = 1.0 - alpha;
    const double slack = 1e-7;

    // Slice m (0..n) asks r_high >= level >= r_low where, in 1-based indices,
    // (high, low) = (m, m+1) for increasing payoffs and (m+1, m) otherwise.
    // Index 0 and n+1 carry no constraint.
    auto high_of = [&](std::size_t m) { return form.increasing ? m : m + 1; };
    auto low_of = [&](std::size_t m) { return form.increasing ? m + 1 : m; };
    auto high_ok = [&](std::size_t m) {
        const std::size_t k = high_of(m);
        return k == 0 || k == n + 1 || region.r_max(k - 1) >= level - slack;
    };
    auto low_ok = [&](std::size_t m) {
        const std::size_t k = low_of(m);
        return k == 0 || k == n + 1 || region.r_min(k - 1) <= level + slack;
    };

    // For increasing payoffs high_ok holds on a prefix of slices and low_ok on
    // a suffix; for decreasing payoffs the other way round.
    auto first_false = [&](const std::function<bool(std::size_t)>& ok) {
        std::size_t lo = 0, hi = n + 1;  // ok on [0, lo), false from hi
        while (lo < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (ok(mid)) lo = mid + 1; else hi = mid;
        }
        return lo;
    };
    std::size_t begin = 0;
    std::size_t end = n + 1;
    if (form.increasing) {
        end = first_false(high_ok);
        begin = first_false([&](std::size_t m) { return !low_ok(m); });
    } else {
        end = first_false(low_ok);
        begin = first_false([&](std::size_t m) { return !high_ok(m); });
    }

    const double inv = 1.0 / (1.0 - alpha);
    double best_lo = std::numeric_limits<double>::infinity();
    double best_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t m = begin; m < end; ++m) {
        std::vector<double> w(n, 0.0);
        double constant = form.z0;
        for (std::size_t k = 1; k <= n; ++k) {
            // Increasing: terms above the slice are linear; decreasing: terms at or below it.
            const bool linear = form.increasing ? k > m : k <= m;
            if (linear) {
                w[k - 1] = form.z[k - 1] * inv;
            } else {
                constant += form.z[k - 1];
            }
        }
        std::vector<FeasibleRegion::RBound> extra;
        const std::size_t hk = high_of(m);
        const std::size_t lk = low_of(m);
        if (hk >= 1 && hk <= n) extra.push_back({hk - 1, true, level});
        if (lk >= 1 && lk <= n) extra.push_back({lk - 1, false, level});

        const auto lo = region.optimize(w, lp::Sense::Minimize, extra);
        if (lo.status != lp::Status::Optimal) continue;
        const auto hi = region.optimize(w, lp::Sense::Maximize, extra);
        if (hi.status != lp::Status::Optimal) continue;
        if (constant + lo.value < best_lo) {
            best_lo = constant + lo.value;
            out.r_lower = lo.r;
        }
        if (constant + hi.value > best_hi) {
            best_hi = constant + hi.value;
            out.r_upper = hi.r;
        }
    }
    if (!std::isfinite(best_lo) || !std::isfinite(best_hi)) {
        throw SolverError("ES bounds: every slice of the region was reported empty");
    }
    out.lower = best_lo;
    out.upper = best_hi;
    return out;
}

BoundResult risk_bounds(const FeasibleRegion& region, const CanonicalForm& form, const Distortion& h) {
    switch (h.kind()) {
        case MeasureKind::Mean: return mean_bounds(region, form);
        case MeasureKind::VaR: return var_bounds(region, form, h.alpha());
        case MeasureKind::ES: return es_bounds(region, form, h.alpha());
    }
    throw std::logic_error("unknown measure");
}

BoundResult mean_bounds_linear(const PriceLinearForm& plf, const Copula& c_ref, Norm norm, double eps) {
    const std::size_t n = plf.points.size();
    FeasibleRegion region(plf.points, std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), c_ref,
                          norm, eps);
    BoundResult out;
    out.measure = "mean";
    out.epsilon = eps;
    const auto lo = region.optimize(plf.coef, lp::Sense::Minimize);
    const auto hi = region.optimize(plf.coef, lp::Sense::Maximize);
    if (lo.status != lp::Status::Optimal || hi.status != lp::Status::Optimal) {
        throw SolverError("linear price bounds: region reported empty");
    }
    out.lower = plf.c0 + lo.value;
    out.upper = plf.c0 + hi.value;
    out.r_lower = lo.r;
    out.r_upper = hi.r;
    return out;
}

EpsilonMax epsilon_max(const std::vector<UnitPoint>& points, const Copula& c_ref, Norm norm) {
    FeasibleRegion region(points, c_ref);
    EpsilonMax out;
    out.is_exact = norm == Norm::Linf;
    out.per_point.resize(points.size());
    for (std::size_t m = 0; m < points.size(); ++m) {
        const double ref = region.r_ref()[m];
        out.per_point[m] = std::max(std::abs(region.r_max(m) - ref), std::abs(region.r_min(m) - ref));
        out.value = norm == Norm::Linf ? std::max(out.value, out.per_point[m]) : out.value + out.per_point[m];
    }
    return out;
}

double copula_distance(const std::vector<UnitPoint>& points, const Copula& a, const Copula& b, Norm norm) {
    double d = 0.0;
    for (const auto& p : points) {
        const double x = std::abs(a(p) - b(p));
        d = norm == Norm::Linf ? std::max(d, x) : d + x;
    }
    return d;
}

double epsilon_for_family(const std::vector<Copula>& candidates, const Copula& c_ref,
                          const std::vector<UnitPoint>& points, Norm norm) {
    if (candidates.empty()) throw std::domain_error("epsilon_for_family: empty candidate list");
    double best = 0.0;
    for (const auto& c : candidates) best = std::max(best, copula_distance(points, c, c_ref, norm));
    return best;
}

std::vector<BoundResult> sweep(const CanonicalForm& form, const Copula& c_ref, Norm norm,
                               const std::vector<double>& eps_grid,
                               const std::vector<Distortion>& measures, int threads) {
    if (!std::is_sorted(eps_grid.begin(), eps_grid.end())) {
        throw std::invalid_argument("sweep: epsilon grid must be sorted ascending");
    }
    const std::size_t nm = measures.size();
    std::vector<BoundResult> rows(eps_grid.size() * nm);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&]() {
        while (!failed) {
            const std::size_t i = next++;
            if (i >= eps_grid.size()) return;
            try {
                const FeasibleRegion region = build_region(form, c_ref, norm, eps_grid[i]);
                for (std::size_t k = 0; k < nm; ++k) rows[i * nm + k] = risk_bounds(region, form, measures[k]);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(eps_grid.size())));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

std::vector<double> default_epsilon_grid(double eps_max, int points) {
    std::vector<double> grid{0.0};
    if (points <= 1 || !(eps_max > 0.0)) return grid;
    const int k = points - 1;
    const double lo = std::log(1e-4 * eps_max);
    const double hi = std::log(eps_max);
    for (int i = 0; i < k; ++i) {
        grid.push_back(i == k - 1 ? eps_max : std::exp(lo + (hi - lo) * i / std::max(1, k - 1)));
    }
    return grid;
}

std::vector<double> r_curve(const CanonicalForm& form, const Copula& c) {
    std::vector<double> r(form.size());
    for (std::size_t m = 0; m < form.size(); ++m) r[m] = form.r_at(m, c(form.points[m]));
    return r;
}

}  // namespace jlrisk
