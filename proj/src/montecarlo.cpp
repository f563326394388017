#include "jlrisk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "jlrisk/riskmeasures.hpp"

namespace jlrisk {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

// Uniform on the open interval (0, 1) from the top 53 bits.
double uniform_open(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

double exponential(std::mt19937_64& g) { return -std::log(uniform_open(g)); }

enum class Base { Independence, Comonotone, Countermonotone, Gumbel };

struct Plan {
    Base base = Base::Independence;
    double delta = 1.0;
    bool flip = false;
};

Plan plan_for(const Copula& c) {
    Plan p;
    const Copula* cur = &c;
    while (cur->kind() == CopulaKind::Survival) {
        p.flip = !p.flip;
        cur = &cur->inner();
    }
    switch (cur->kind()) {
        case CopulaKind::Independence: p.base = Base::Independence; break;
        case CopulaKind::Comonotone: p.base = Base::Comonotone; break;
        case CopulaKind::Countermonotone: p.base = Base::Countermonotone; break;
        case CopulaKind::Gumbel:
            p.base = Base::Gumbel;
            p.delta = cur->delta();
            break;
        default:
            throw std::invalid_argument("sample_copula: " + c.describe() + " is not a sampleable copula");
    }
    return p;
}

UnitPoint draw(const Plan& p, std::mt19937_64& g) {
    UnitPoint s;
    switch (p.base) {
        case Base::Independence:
            s.u = uniform_open(g);
            s.v = uniform_open(g);
            break;
        case Base::Comonotone:
            s.u = s.v = uniform_open(g);
            break;
        case Base::Countermonotone:
            s.u = uniform_open(g);
            s.v = 1.0 - s.u;
            break;
        case Base::Gumbel: {
            if (p.delta == 1.0) {
                s.u = uniform_open(g);
                s.v = uniform_open(g);
                break;
            }
            // Frailty construction: positive stable S with Laplace transform
            // exp(-t^a), a = 1/delta (Chambers-Mallows-Stuck), then
            // U_i = exp(-(E_i / S)^a).
            const double a = 1.0 / p.delta;
            const double theta = uniform_open(g) * std::numbers::pi;
            const double w = exponential(g);
            const double stable = std::sin(a * theta) / std::pow(std::sin(theta), 1.0 / a) *
                                  std::pow(std::sin((1.0 - a) * theta) / w, (1.0 - a) / a);
            const double e1 = exponential(g);
            const double e2 = exponential(g);
            s.u = std::exp(-std::pow(e1 / stable, a));
            s.v = std::exp(-std::pow(e2 / stable, a));
            break;
        }
    }
    if (p.flip) {
        s.u = 1.0 - s.u;
        s.v = 1.0 - s.v;
    }
    return s;
}

}  // namespace

std::vector<UnitPoint> sample_copula(const Copula& c, std::size_t n, std::uint64_t seed, int threads) {
    const Plan plan = plan_for(c);
    std::vector<UnitPoint> out(n);
    const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
    auto fill = [&](std::size_t b) {
        std::mt19937_64 g(splitmix64(seed ^ splitmix64(b)));
        const std::size_t end = std::min(n, (b + 1) * kSampleBlock);
        for (std::size_t i = b * kSampleBlock; i < end; ++i) out[i] = draw(plan, g);
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) fill(b);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t b = t; b < blocks; b += workers) fill(b);
            });
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<double> simulate_payoffs(const Contract& contract, const GompertzMarginal& x,
                                     const GompertzMarginal& y, const std::vector<UnitPoint>& samples) {
    contract.validate();
    const int n = contract.term();
    std::vector<double> discounted(n + 1, 0.0);
    std::vector<double> cumulative(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
        discounted[k] = contract.discounted(k);
        cumulative[k] = cumulative[k - 1] + discounted[k];
    }
    const bool single = contract.kind != ContractKind::ReversionaryAnnuity &&
                        contract.kind != ContractKind::WidowsPension;
    PayoffSpec spec;
    if (single) spec = payoff_spec(contract);

    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        const long kx = static_cast<long>(std::floor(x.quantile_survival(s.u)));
        const long ky = static_cast<long>(std::floor(y.quantile_survival(s.v)));
        const long kmin = std::min(kx, ky);
        const long kmax = std::max(kx, ky);
        auto annuity = [&](long k) { return cumulative[std::min<long>(n, k)]; };
        if (single) {
            out.push_back(spec.at(spec.statistic == Statistic::FirstDeath ? kmin : kmax));
        } else if (contract.kind == ContractKind::ReversionaryAnnuity) {
            out.push_back(annuity(kmax) - annuity(kmin));
        } else {
            out.push_back(annuity(kx) - annuity(kmin));
        }
    }
    return out;
}

EmpiricalMeasures empirical_measures(const std::vector<double>& payoffs, double alpha_var,
                                     double alpha_es, int resamples, std::uint64_t seed) {
    if (payoffs.empty()) throw std::invalid_argument("empirical_measures: no payoffs");
    Distortion::var(alpha_var);  // validates the levels
    Distortion::es(alpha_es);
    std::map<double, long> counts;
    for (double p : payoffs) ++counts[p];
    std::vector<double> values;
    std::vector<long> freq;
    for (const auto& [v, c] : counts) {
        values.push_back(v);
        freq.push_back(c);
    }
    const long n = static_cast<long>(payoffs.size());
    // Plug-in measures from integer counts, so the quantile index is exact.
    auto law = [&](const std::vector<long>& f) {
        DiscreteMeasures m;
        const double dn = static_cast<double>(n);
        auto quantile = [&](double alpha) {
            const long need = static_cast<long>(std::ceil(alpha * dn - 1e-9));
            long cum = 0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                cum += f[i];
                if (f[i] > 0 && cum >= need) return values[i];
            }
            return values.back();
        };
        for (std::size_t i = 0; i < values.size(); ++i) m.mean += values[i] * static_cast<double>(f[i]);
        m.mean /= dn;
        m.var = quantile(alpha_var);
        const double q = quantile(alpha_es);
        double excess = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] > q) excess += (values[i] - q) * static_cast<double>(f[i]);
        }
        m.es = q + excess / (dn * (1.0 - alpha_es));
        return m;
    };

    EmpiricalMeasures out;
    out.n = payoffs.size();
    const DiscreteMeasures point = law(freq);
    out.mean = point.mean;
    out.var = point.var;
    out.es = point.es;
    if (resamples < 2) return out;

    // Multinomial resampling of the distinct values by conditional binomials.
    std::mt19937_64 g(splitmix64(seed));
    double s1[3] = {0, 0, 0};
    double s2[3] = {0, 0, 0};
    std::vector<long> f(values.size());
    for (int r = 0; r < resamples; ++r) {
        long left = n;
        long mass = n;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i + 1 == values.size() || left == 0) {
                f[i] = left;
            } else {
                std::binomial_distribution<long> bin(left, static_cast<double>(freq[i]) / static_cast<double>(mass));
                f[i] = bin(g);
            }
            left -= f[i];
            mass -= freq[i];
        }
        const DiscreteMeasures m = law(f);
        const double x[3] = {m.mean, m.var, m.es};
        for (int k = 0; k < 3; ++k) {
            s1[k] += x[k];
            s2[k] += x[k] * x[k];
        }
    }
    double se[3];
    for (int k = 0; k < 3; ++k) {
        const double mean = s1[k] / resamples;
        se[k] = std::sqrt(std::max(0.0, (s2[k] - resamples * mean * mean) / (resamples - 1)));
    }
    out.se_mean = se[0];
    out.se_var = se[1];
    out.se_es = se[2];
    return out;
}

double empirical_kendall_tau(std::vector<UnitPoint> samples) {
    const std::size_t n = samples.size();
    if (n < 2) return 0.0;
    std::sort(samples.begin(), samples.end(),
              [](const UnitPoint& a, const UnitPoint& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
    // Count inversions in v by merge sort: discordant pairs (continuous data, no ties).
    std::vector<double> v(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = samples[i].v;
    long double inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo < n; lo += 2 * width) {
            const std::size_t mid = std::min(n, lo + width);
            const std::size_t hi = std::min(n, lo + 2 * width);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    inversions += static_cast<long double>(mid - i);
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        std::swap(v, buf);
    }
    const long double pairs = static_cast<long double>(n) * (n - 1) / 2.0L;
    return static_cast<double>(1.0L - 2.0L * inversions / pairs);
}

}  // namespace jlrisk
