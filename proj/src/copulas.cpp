#include "jlrisk/copulas.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace jlrisk {

namespace {

struct IndependenceNode {};
struct ComonotoneNode {};
struct CountermonotoneNode {};
struct GumbelNode {
    double delta;
};
struct SurvivalNode {
    Copula inner;
};
struct TauLowerNode {
    double tau;
};
struct TauUpperNode {
    double tau;
};
struct TankovNode {
    std::vector<UnitPoint> points;
    std::vector<double> values;
    std::string source;
};

double clamp_fh(double u, double v, double c) {
    return std::clamp(c, fh_lower(u, v), fh_upper(u, v));
}

double gumbel_eval(double delta, double u, double v) {
    constexpr double tiny = 1e-300;
    if (u < tiny || v < tiny) return 0.0;
    if (u >= 1.0) return std::min(v, 1.0);
    if (v >= 1.0) return u;
    const double x = -std::log(u);
    const double y = -std::log(v);
    const double hi = std::max(x, y);
    const double lo = std::min(x, y);
    // hi * (1 + (lo/hi)^d)^(1/d) avoids overflow of x^d for large d.
    const double s = hi * std::pow(1.0 + std::pow(lo / hi, delta), 1.0 / delta);
    return clamp_fh(u, v, std::exp(-s));
}

double positive(double x) { return x > 0.0 ? x : 0.0; }

void check_unit_point(const UnitPoint& p) {
    if (!(p.u >= 0.0 && p.u <= 1.0 && p.v >= 0.0 && p.v <= 1.0)) {
        throw std::domain_error("tankov_bounds: point outside the unit square");
    }
}

TankovNode make_tankov(std::vector<UnitPoint> points, const Copula& q) {
    TankovNode node;
    node.values.reserve(points.size());
    for (const auto& p : points) {
        check_unit_point(p);
        node.values.push_back(q(p));
    }
    node.points = std::move(points);
    node.source = q.describe();
    return node;
}

}  // namespace

struct Copula::Node {
    std::variant<IndependenceNode, ComonotoneNode, CountermonotoneNode, GumbelNode, SurvivalNode,
                 TauLowerNode, TauUpperNode, TankovNode>
        body;
    CopulaKind kind;
};

Copula Copula::independence() {
    return Copula(std::make_shared<const Node>(Node{IndependenceNode{}, CopulaKind::Independence}));
}

Copula Copula::comonotone() {
    return Copula(std::make_shared<const Node>(Node{ComonotoneNode{}, CopulaKind::Comonotone}));
}

Copula Copula::countermonotone() {
    return Copula(
        std::make_shared<const Node>(Node{CountermonotoneNode{}, CopulaKind::Countermonotone}));
}

Copula Copula::gumbel(double delta) {
    if (!(delta >= 1.0) || !std::isfinite(delta)) {
        throw std::domain_error("gumbel: delta must be >= 1");
    }
    return Copula(std::make_shared<const Node>(Node{GumbelNode{delta}, CopulaKind::Gumbel}));
}

Copula Copula::survival_of(const Copula& inner) {
    return Copula(std::make_shared<const Node>(Node{SurvivalNode{inner}, CopulaKind::Survival}));
}

Copula Copula::tau_band_lower(double tau) {
    if (!(tau >= -1.0 && tau <= 1.0)) throw std::domain_error("tau_band: tau outside [-1, 1]");
    return Copula(std::make_shared<const Node>(Node{TauLowerNode{tau}, CopulaKind::TauBandLower}));
}

Copula Copula::tau_band_upper(double tau) {
    if (!(tau >= -1.0 && tau <= 1.0)) throw std::domain_error("tau_band: tau outside [-1, 1]");
    return Copula(std::make_shared<const Node>(Node{TauUpperNode{tau}, CopulaKind::TauBandUpper}));
}

Copula Copula::tankov_lower(std::vector<UnitPoint> points, const Copula& q) {
    return Copula(std::make_shared<const Node>(
        Node{make_tankov(std::move(points), q), CopulaKind::TankovLower}));
}

Copula Copula::tankov_upper(std::vector<UnitPoint> points, const Copula& q) {
    return Copula(std::make_shared<const Node>(
        Node{make_tankov(std::move(points), q), CopulaKind::TankovUpper}));
}

CopulaKind Copula::kind() const { return node_->kind; }

double Copula::delta() const {
    if (const auto* g = std::get_if<GumbelNode>(&node_->body)) return g->delta;
    if (const auto* s = std::get_if<SurvivalNode>(&node_->body)) return s->inner.delta();
    throw std::logic_error("delta() requested from a non-Gumbel copula");
}

const Copula& Copula::inner() const {
    if (const auto* s = std::get_if<SurvivalNode>(&node_->body)) return s->inner;
    throw std::logic_error("inner() requested from a copula that is not a survival transform");
}

bool Copula::is_copula() const {
    switch (node_->kind) {
        case CopulaKind::Independence:
        case CopulaKind::Comonotone:
        case CopulaKind::Countermonotone:
        case CopulaKind::Gumbel:
            return true;
        case CopulaKind::Survival:
            return inner().is_copula();
        case CopulaKind::TankovLower:
        case CopulaKind::TankovUpper:
        case CopulaKind::TauBandLower:
        case CopulaKind::TauBandUpper:
            return false;
    }
    return false;
}

std::string Copula::describe() const {
    std::ostringstream os;
    switch (node_->kind) {
        case CopulaKind::Independence: os << "independence"; break;
        case CopulaKind::Comonotone: os << "comonotone"; break;
        case CopulaKind::Countermonotone: os << "countermonotone"; break;
        case CopulaKind::Gumbel: os << "gumbel(" << delta() << ")"; break;
        case CopulaKind::Survival: os << "survival(" << inner().describe() << ")"; break;
        case CopulaKind::TauBandLower:
            os << "tau_band_lower(" << std::get<TauLowerNode>(node_->body).tau << ")";
            break;
        case CopulaKind::TauBandUpper:
            os << "tau_band_upper(" << std::get<TauUpperNode>(node_->body).tau << ")";
            break;
        case CopulaKind::TankovLower:
        case CopulaKind::TankovUpper: {
            const auto& t = std::get<TankovNode>(node_->body);
            os << (node_->kind == CopulaKind::TankovLower ? "tankov_lower(" : "tankov_upper(")
               << t.points.size() << " points, " << t.source << ")";
            break;
        }
    }
    return os.str();
}

double Copula::operator()(double u, double v) const {
    u = std::clamp(u, 0.0, 1.0);
    v = std::clamp(v, 0.0, 1.0);
    switch (node_->kind) {
        case CopulaKind::Independence:
            return u * v;
        case CopulaKind::Comonotone:
            return fh_upper(u, v);
        case CopulaKind::Countermonotone:
            return fh_lower(u, v);
        case CopulaKind::Gumbel:
            return gumbel_eval(std::get<GumbelNode>(node_->body).delta, u, v);
        case CopulaKind::Survival: {
            const auto& inner = std::get<SurvivalNode>(node_->body).inner;
            return clamp_fh(u, v, u + v - 1.0 + inner(1.0 - u, 1.0 - v));
        }
        case CopulaKind::TauBandLower: {
            const double t = std::get<TauLowerNode>(node_->body).tau;
            const double d = u - v;
            const double band = 0.5 * ((u + v) - std::sqrt(d * d + 1.0 - t));
            return clamp_fh(u, v, std::max(fh_lower(u, v), band));
        }
        case CopulaKind::TauBandUpper: {
            const double t = std::get<TauUpperNode>(node_->body).tau;
            const double s = u + v - 1.0;
            const double band = 0.5 * (s + std::sqrt(s * s + 1.0 + t));
            return clamp_fh(u, v, std::min(fh_upper(u, v), band));
        }
        case CopulaKind::TankovLower: {
            const auto& t = std::get<TankovNode>(node_->body);
            double best = fh_lower(u, v);
            for (std::size_t i = 0; i < t.points.size(); ++i) {
                best = std::max(best, t.values[i] - positive(t.points[i].u - u) -
                                          positive(t.points[i].v - v));
            }
            return best;
        }
        case CopulaKind::TankovUpper: {
            const auto& t = std::get<TankovNode>(node_->body);
            double best = fh_upper(u, v);
            for (std::size_t i = 0; i < t.points.size(); ++i) {
                best = std::min(best, t.values[i] + positive(u - t.points[i].u) +
                                          positive(v - t.points[i].v));
            }
            return best;
        }
    }
    return 0.0;
}

GumbelSummaries gumbel_summaries(double delta) {
    if (!(delta >= 1.0)) throw std::domain_error("gumbel_summaries: delta must be >= 1");
    const double root = std::pow(2.0, 1.0 / delta);
    return {(delta - 1.0) / delta, 2.0 - root, root};
}

CopulaBounds tankov_bounds(const std::vector<UnitPoint>& points, const Copula& q) {
    if (points.empty()) return {Copula::countermonotone(), Copula::comonotone()};
    return {Copula::tankov_lower(points, q), Copula::tankov_upper(points, q)};
}

CopulaBounds tau_band_bounds(double tau) {
    return {Copula::tau_band_lower(tau), Copula::tau_band_upper(tau)};
}

double kendalls_tau_numeric(const Copula& c, int grid_n) {
    if (grid_n < 2) throw std::domain_error("kendalls_tau_numeric: grid_n too small");
    const int n = grid_n;
    const double h = 1.0 / n;
    // Node values C(i/n, j/n); derivatives are taken at cell centres.
    std::vector<double> prev(n + 1), cur(n + 1);
    for (int j = 0; j <= n; ++j) prev[j] = c(0.0, j * h);
    double integral = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double u = (i == n) ? 1.0 : i * h;
        for (int j = 0; j <= n; ++j) cur[j] = c(u, (j == n) ? 1.0 : j * h);
        for (int j = 0; j < n; ++j) {
            const double d1 = (cur[j] + cur[j + 1] - prev[j] - prev[j + 1]) / (2.0 * h);
            const double d2 = (prev[j + 1] + cur[j + 1] - prev[j] - cur[j]) / (2.0 * h);
            integral += d1 * d2;
        }
        std::swap(prev, cur);
    }
    return 1.0 - 4.0 * integral * h * h;
}

}  // namespace jlrisk
