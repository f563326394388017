#include "jlrisk/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "jlrisk/montecarlo.hpp"

namespace jlrisk {

using nlohmann::json;

namespace {

const std::string kBundled = R"JSON({
  "lives": {
    "x": {"mode_years": 85.47, "dispersion_years": 10.45},
    "y": {"mode_years": 91.57, "dispersion_years": 8.13},
    "max_age_years": 115
  },
  "contracts": [
    {"name": "F2DA", "kind": "joint_life_annuity", "entry_ages_years": [35, 32],
     "level": 1.0, "term_years": null, "interest_rate": 0.05, "calibration_anchor": true},
    {"name": "S2DA", "kind": "last_survivor_annuity", "entry_ages_years": [65, 62],
     "level": null, "term_years": null, "interest_rate": 0.05, "calibration_anchor": false},
    {"name": "F2DI", "kind": "joint_life_insurance", "entry_ages_years": [65, 62],
     "level": null, "term_years": null, "interest_rate": 0.05, "calibration_anchor": false},
    {"name": "S2DI", "kind": "last_survivor_insurance", "entry_ages_years": [65, 62],
     "level": null, "term_years": null, "interest_rate": 0.05, "calibration_anchor": false}
  ],
  "copula": {"family": "gumbel", "delta": 1.96, "survival": true},
  "uncertainty": {
    "norms": ["l1", "linf"],
    "epsilons": [],
    "grid_points": 60,
    "gamma": 1.0,
    "family_deltas": {"min": 1.90, "max": 2.02, "count": 121},
    "tankov_box": [0.2, 0.8],
    "kendall_tau": null
  },
  "measures": [
    {"kind": "mean"},
    {"kind": "var", "alpha": 0.99},
    {"kind": "es", "alpha": 0.975}
  ],
  "simulation": {"samples": 1000000, "bootstrap_resamples": 200},
  "seed": 20240601,
  "output_dir": "out"
}
)JSON";

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config field '" + field + "': " + why);
}

const json* find(const json& j, const char* key) {
    if (!j.is_object()) return nullptr;
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return nullptr;
    return &*it;
}

double number(const json& j, const char* key, const std::string& path, std::optional<double> fallback = {}) {
    const json* v = find(j, key);
    if (!v) {
        if (fallback) return *fallback;
        bad(path + "." + key, "missing");
    }
    if (!v->is_number()) bad(path + "." + key, "expected a number");
    return v->get<double>();
}

LifeConfig parse_life(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
    LifeConfig l;
    l.mode_years = number(j, "mode_years", path);
    l.dispersion_years = number(j, "dispersion_years", path);
    if (!(l.dispersion_years > 0.0)) bad(path + ".dispersion_years", "must be > 0");
    return l;
}

Distortion parse_measure(const json& j, const std::string& path) {
    if (!j.is_object() || !find(j, "kind") || !j["kind"].is_string()) bad(path + ".kind", "expected a string");
    const std::string kind = j["kind"];
    try {
        if (kind == "mean") return Distortion::mean();
        if (kind == "var") return Distortion::var(number(j, "alpha", path));
        if (kind == "es") return Distortion::es(number(j, "alpha", path));
    } catch (const std::domain_error& e) {
        bad(path + ".alpha", e.what());
    }
    bad(path + ".kind", "unknown measure '" + kind + "'");
}

json measure_json(const Distortion& h) {
    switch (h.kind()) {
        case MeasureKind::Mean: return json{{"kind", "mean"}};
        case MeasureKind::VaR: return json{{"kind", "var"}, {"alpha", h.alpha()}};
        case MeasureKind::ES: return json{{"kind", "es"}, {"alpha", h.alpha()}};
    }
    return json();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("<root>", "expected an object");
    ExperimentConfig c;

    const json* lives = find(root, "lives");
    if (!lives) bad("lives", "missing");
    if (!find(*lives, "x")) bad("lives.x", "missing");
    if (!find(*lives, "y")) bad("lives.y", "missing");
    c.x = parse_life((*lives)["x"], "lives.x");
    c.y = parse_life((*lives)["y"], "lives.y");
    c.max_age_years = number(*lives, "max_age_years", "lives", 115.0);

    const json* contracts = find(root, "contracts");
    if (!contracts || !contracts->is_array() || contracts->empty()) bad("contracts", "expected a nonempty array");
    for (std::size_t i = 0; i < contracts->size(); ++i) {
        const json& cj = (*contracts)[i];
        const std::string path = "contracts[" + std::to_string(i) + "]";
        ContractConfig cc;
        if (!find(cj, "name") || !cj["name"].is_string()) bad(path + ".name", "expected a string");
        cc.name = cj["name"];
        if (!find(cj, "kind") || !cj["kind"].is_string()) bad(path + ".kind", "expected a string");
        try {
            cc.kind = parse_contract_kind(cj["kind"]);
        } catch (const std::invalid_argument& e) {
            bad(path + ".kind", e.what());
        }
        const json* ages = find(cj, "entry_ages_years");
        if (!ages || !ages->is_array() || ages->size() != 2 || !(*ages)[0].is_number() || !(*ages)[1].is_number()) {
            bad(path + ".entry_ages_years", "expected [age_x, age_y]");
        }
        cc.entry_age_x = (*ages)[0];
        cc.entry_age_y = (*ages)[1];
        if (const json* lv = find(cj, "level")) {
            if (!lv->is_number()) bad(path + ".level", "expected a number or null");
            cc.level = lv->get<double>();
        }
        if (const json* t = find(cj, "term_years")) {
            if (!t->is_number_integer() || t->get<int>() < 1) bad(path + ".term_years", "expected a positive integer or null");
            cc.term_years = t->get<int>();
        }
        cc.interest_rate = number(cj, "interest_rate", path, 0.05);
        if (!(cc.interest_rate > 0.0)) bad(path + ".interest_rate", "must be > 0");
        if (const json* a = find(cj, "calibration_anchor")) {
            if (!a->is_boolean()) bad(path + ".calibration_anchor", "expected a boolean");
            cc.calibration_anchor = *a;
        }
        c.contracts.push_back(cc);
    }

    if (const json* cop = find(root, "copula")) {
        if (const json* f = find(*cop, "family")) {
            if (!f->is_string()) bad("copula.family", "expected a string");
            c.copula.family = *f;
        }
        c.copula.delta = number(*cop, "delta", "copula", 1.0);
        if (const json* s = find(*cop, "survival")) {
            if (!s->is_boolean()) bad("copula.survival", "expected a boolean");
            c.copula.survival = *s;
        }
    }
    const std::string& fam = c.copula.family;
    if (fam != "gumbel" && fam != "independence" && fam != "comonotone" && fam != "countermonotone") {
        bad("copula.family", "unknown family '" + fam + "'");
    }
    if (fam == "gumbel" && !(c.copula.delta >= 1.0)) bad("copula.delta", "must be >= 1");

    if (const json* u = find(root, "uncertainty")) {
        auto& uc = c.uncertainty;
        if (const json* n = find(*u, "norms")) {
            if (!n->is_array() || n->empty()) bad("uncertainty.norms", "expected a nonempty array");
            uc.norms.clear();
            for (const auto& e : *n) {
                try {
                    uc.norms.push_back(parse_norm(e.get<std::string>()));
                } catch (const std::exception& ex) {
                    bad("uncertainty.norms", ex.what());
                }
            }
        }
        if (const json* e = find(*u, "epsilons")) {
            if (!e->is_array()) bad("uncertainty.epsilons", "expected an array");
            for (const auto& x : *e) {
                if (!x.is_number() || x.get<double>() < 0.0) bad("uncertainty.epsilons", "expected numbers >= 0");
                uc.epsilons.push_back(x);
            }
            if (!std::is_sorted(uc.epsilons.begin(), uc.epsilons.end())) bad("uncertainty.epsilons", "must be ascending");
        }
        uc.grid_points = static_cast<int>(number(*u, "grid_points", "uncertainty", 60));
        if (uc.grid_points < 1) bad("uncertainty.grid_points", "must be >= 1");
        uc.gamma = number(*u, "gamma", "uncertainty", 1.0);
        if (!(uc.gamma > 0.0)) bad("uncertainty.gamma", "must be > 0");
        if (const json* fd = find(*u, "family_deltas")) {
            uc.family_delta_min = number(*fd, "min", "uncertainty.family_deltas");
            uc.family_delta_max = number(*fd, "max", "uncertainty.family_deltas");
            uc.family_delta_count = static_cast<int>(number(*fd, "count", "uncertainty.family_deltas"));
            if (!(uc.family_delta_min >= 1.0 && uc.family_delta_max >= uc.family_delta_min) ||
                uc.family_delta_count < 1) {
                bad("uncertainty.family_deltas", "need 1 <= min <= max and count >= 1");
            }
        }
        if (const json* tb = find(*u, "tankov_box")) {
            if (!tb->is_array() || tb->size() != 2) bad("uncertainty.tankov_box", "expected [lo, hi]");
            uc.tankov_min = (*tb)[0];
            uc.tankov_max = (*tb)[1];
        }
        if (const json* kt = find(*u, "kendall_tau")) {
            if (!kt->is_number() || std::abs(kt->get<double>()) > 1.0) bad("uncertainty.kendall_tau", "expected a number in [-1, 1]");
            uc.kendall_tau = kt->get<double>();
        }
    }

    if (const json* ms = find(root, "measures")) {
        if (!ms->is_array() || ms->empty()) bad("measures", "expected a nonempty array");
        c.measures.clear();
        for (std::size_t i = 0; i < ms->size(); ++i) {
            c.measures.push_back(parse_measure((*ms)[i], "measures[" + std::to_string(i) + "]"));
        }
    }

    if (const json* s = find(root, "simulation")) {
        const double n = number(*s, "samples", "simulation", 1e6);
        if (!(n >= 1.0)) bad("simulation.samples", "must be >= 1");
        c.simulation.samples = static_cast<std::size_t>(n);
        c.simulation.bootstrap_resamples = static_cast<int>(number(*s, "bootstrap_resamples", "simulation", 200));
    }
    if (const json* s = find(root, "seed")) {
        if (!s->is_number_unsigned() && !s->is_number_integer()) bad("seed", "expected an unsigned integer");
        c.seed = s->get<std::uint64_t>();
    }
    if (const json* o = find(root, "output_dir")) {
        if (!o->is_string()) bad("output_dir", "expected a string");
        c.output_dir = *o;
    }

    int anchors = 0;
    bool needs_anchor = false;
    for (const auto& cc : c.contracts) {
        anchors += cc.calibration_anchor ? 1 : 0;
        needs_anchor = needs_anchor || !cc.level;
        if (cc.calibration_anchor && !cc.level) bad("contracts", "the calibration anchor needs a level");
    }
    if (anchors > 1) bad("contracts", "at most one calibration anchor");
    if (needs_anchor && anchors == 0) bad("contracts", "a contract without level needs a calibration anchor");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& c) {
    json root;
    root["lives"] = {{"x", {{"mode_years", c.x.mode_years}, {"dispersion_years", c.x.dispersion_years}}},
                     {"y", {{"mode_years", c.y.mode_years}, {"dispersion_years", c.y.dispersion_years}}},
                     {"max_age_years", c.max_age_years}};
    json contracts = json::array();
    for (const auto& cc : c.contracts) {
        json j;
        j["name"] = cc.name;
        j["kind"] = to_string(cc.kind);
        j["entry_ages_years"] = {cc.entry_age_x, cc.entry_age_y};
        j["level"] = cc.level ? json(*cc.level) : json(nullptr);
        j["term_years"] = cc.term_years ? json(*cc.term_years) : json(nullptr);
        j["interest_rate"] = cc.interest_rate;
        j["calibration_anchor"] = cc.calibration_anchor;
        contracts.push_back(j);
    }
    root["contracts"] = contracts;
    root["copula"] = {{"family", c.copula.family}, {"delta", c.copula.delta}, {"survival", c.copula.survival}};
    const auto& u = c.uncertainty;
    json norms = json::array();
    for (Norm n : u.norms) norms.push_back(to_string(n));
    root["uncertainty"] = {
        {"norms", norms},
        {"epsilons", u.epsilons},
        {"grid_points", u.grid_points},
        {"gamma", u.gamma},
        {"family_deltas", {{"min", u.family_delta_min}, {"max", u.family_delta_max}, {"count", u.family_delta_count}}},
        {"tankov_box", {u.tankov_min, u.tankov_max}},
        {"kendall_tau", u.kendall_tau ? json(*u.kendall_tau) : json(nullptr)}};
    json measures = json::array();
    for (const auto& h : c.measures) measures.push_back(measure_json(h));
    root["measures"] = measures;
    root["simulation"] = {{"samples", c.simulation.samples}, {"bootstrap_resamples", c.simulation.bootstrap_resamples}};
    root["seed"] = c.seed;
    root["output_dir"] = c.output_dir;
    return root.dump(2) + "\n";
}

const std::string& bundled_config_text() { return kBundled; }

ExperimentConfig bundled_config() { return parse_config(kBundled); }

Copula reference_copula(const ExperimentConfig& config) {
    const auto& cc = config.copula;
    Copula base = Copula::independence();
    if (cc.family == "gumbel") base = Copula::gumbel(cc.delta);
    if (cc.family == "comonotone") base = Copula::comonotone();
    if (cc.family == "countermonotone") base = Copula::countermonotone();
    return cc.survival ? Copula::survival_of(base) : base;
}

namespace {

Contract unit_contract(const ContractConfig& cc, const GompertzMarginal& x, const GompertzMarginal& y) {
    const int term = cc.term_years ? *cc.term_years : whole_life_term(x, y);
    return Contract::constant(cc.kind, term, 1.0, cc.interest_rate);
}

}  // namespace

std::vector<PreparedContract> prepare_contracts(const ExperimentConfig& config) {
    std::vector<PreparedContract> out;
    for (const auto& cc : config.contracts) {
        GompertzMarginal x(cc.entry_age_x, config.x.mode_years, config.x.dispersion_years,
                           config.max_age_years - cc.entry_age_x);
        GompertzMarginal y(cc.entry_age_y, config.y.mode_years, config.y.dispersion_years,
                           config.max_age_years - cc.entry_age_y);
        const Contract unit = unit_contract(cc, x, y);
        out.push_back(PreparedContract{cc, x, y, unit, 1.0, {}, false, {}, {}, false});
    }
    double anchor_price = 0.0;
    for (auto& p : out) {
        if (p.config.calibration_anchor) {
            anchor_price = price_linear_form(p.contract.scaled(*p.config.level), p.x, p.y).evaluate(Copula::independence());
        }
    }
    for (auto& p : out) {
        p.level = p.config.level ? *p.config.level : calibrate_level(p.contract, p.x, p.y, anchor_price);
        p.contract = p.contract.scaled(p.level);
        p.price_form = price_linear_form(p.contract, p.x, p.y);
        p.single_statistic = p.contract.kind != ContractKind::ReversionaryAnnuity &&
                             p.contract.kind != ContractKind::WidowsPension;
        if (p.single_statistic) {
            p.spec = payoff_spec(p.contract);
            if (p.spec.monotonicity != Monotonicity::NonMonotone) {
                p.form = build_canonical(p.spec, p.x, p.y);
                p.has_form = true;
            }
        }
    }
    return out;
}

std::vector<Atom> contract_payoff_law(const Contract& contract, const GompertzMarginal& x,
                                      const GompertzMarginal& y, const Copula& c) {
    const long hx = x.horizon();
    const long hy = y.horizon();
    std::vector<double> fx(hx + 2), gy(hy + 2);
    for (long i = 0; i <= hx + 1; ++i) fx[i] = x.curtate_survival(i);
    for (long j = 0; j <= hy + 1; ++j) gy[j] = y.curtate_survival(j);
    // P(K_X >= i, K_Y >= j) = C(Fbar(i), Gbar(j))
    std::vector<double> joint((hx + 2) * (hy + 2));
    auto at = [&](long i, long j) -> double& { return joint[i * (hy + 2) + j]; };
    for (long i = 0; i <= hx + 1; ++i) {
        for (long j = 0; j <= hy + 1; ++j) at(i, j) = c(fx[i], gy[j]);
    }
    const int n = contract.term();
    std::vector<double> annuity(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) annuity[k] = annuity[k - 1] + contract.discounted(k);
    auto ann = [&](long k) { return annuity[std::min<long>(n, k)]; };
    auto ins = [&](long k) { return contract.discounted(static_cast<int>(std::min<long>(n, k + 1))); };

    std::vector<Atom> atoms;
    for (long i = 0; i <= hx; ++i) {
        for (long j = 0; j <= hy; ++j) {
            const double p = at(i, j) - at(i + 1, j) - at(i, j + 1) + at(i + 1, j + 1);
            if (p == 0.0) continue;
            const long lo = std::min(i, j);
            const long hi = std::max(i, j);
            double value = 0.0;
            switch (contract.kind) {
                case ContractKind::JointLifeAnnuity: value = ann(lo); break;
                case ContractKind::LastSurvivorAnnuity: value = ann(hi); break;
                case ContractKind::JointLifeInsurance: value = ins(lo); break;
                case ContractKind::LastSurvivorInsurance: value = ins(hi); break;
                case ContractKind::ReversionaryAnnuity: value = ann(hi) - ann(lo); break;
                case ContractKind::WidowsPension: value = ann(i) - ann(lo); break;
            }
            atoms.push_back({value, p});
        }
    }
    return normalize_atoms(std::move(atoms));
}

std::string format_cell(const Table::Cell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* l = std::get_if<long>(&cell)) return std::to_string(*l);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(cell));
    return buf;
}

void write_table(const Table& table, const std::string& dir, OutputFormat format) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + table.name + (format == OutputFormat::Csv ? ".csv" : ".json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    if (format == OutputFormat::Csv) {
        for (std::size_t k = 0; k < table.columns.size(); ++k) out << (k ? "," : "") << table.columns[k];
        out << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_cell(row[k]);
            out << "\n";
        }
        return;
    }
    json arr = json::array();
    for (const auto& row : table.rows) {
        json obj = json::object();
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto& cell = row[k];
            if (std::holds_alternative<std::string>(cell)) {
                obj[table.columns[k]] = std::get<std::string>(cell);
            } else if (std::holds_alternative<long>(cell)) {
                obj[table.columns[k]] = std::get<long>(cell);
            } else {
                const double v = std::get<double>(cell);
                obj[table.columns[k]] = std::isfinite(v) ? json(std::stod(format_cell(cell))) : json(format_cell(cell));
            }
        }
        arr.push_back(obj);
    }
    out << arr.dump(2) << "\n";
}

Table calibration_table(const std::vector<PreparedContract>& contracts) {
    Table t{"calibration", {"contract", "level", "price_at_pi"}, {}};
    for (const auto& p : contracts) {
        t.rows.push_back({p.config.name, p.level, p.price_form.evaluate(Copula::independence())});
    }
    return t;
}

Table price_table(const std::vector<PreparedContract>& contracts, const Copula& c_ref) {
    Table t{"prices", {"contract", "copula", "price"}, {}};
    const std::pair<const char*, Copula> copulas[] = {
        {"independence", Copula::independence()},
        {"reference", c_ref},
        {"comonotone", Copula::comonotone()},
        {"countermonotone", Copula::countermonotone()},
    };
    for (const auto& p : contracts) {
        for (const auto& [name, c] : copulas) t.rows.push_back({p.config.name, std::string(name), p.price_form.evaluate(c)});
    }
    return t;
}

namespace {

std::vector<Copula> family_candidates(const ExperimentConfig& config) {
    const auto& u = config.uncertainty;
    std::vector<Copula> out;
    if (config.copula.family != "gumbel") return {reference_copula(config)};
    for (int i = 0; i < u.family_delta_count; ++i) {
        const double d = u.family_delta_count == 1
                             ? u.family_delta_min
                             : u.family_delta_min + (u.family_delta_max - u.family_delta_min) * i / (u.family_delta_count - 1);
        const Copula g = Copula::gumbel(d);
        out.push_back(config.copula.survival ? Copula::survival_of(g) : g);
    }
    return out;
}

}  // namespace

Table epsmax_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts,
                   const std::vector<Norm>& norms) {
    Table t{"epsmax", {"contract", "norm", "epsilon_max", "is_exact", "family_radius"}, {}};
    const Copula c_ref = reference_copula(config);
    const auto family = family_candidates(config);
    for (const auto& p : contracts) {
        if (!p.has_form) continue;
        for (Norm n : norms) {
            const EpsilonMax e = epsilon_max(p.form.points, c_ref, n);
            const double radius = epsilon_for_family(family, c_ref, p.form.points, n);
            t.rows.push_back({p.config.name, to_string(n), e.value, std::string(e.is_exact ? "true" : "false"), radius});
        }
    }
    return t;
}

Table sweep_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts,
                  const std::vector<Norm>& norms, const std::vector<double>& explicit_eps, int threads) {
    Table t{"sweep", {"contract", "measure", "norm", "epsilon", "lower", "upper"}, {}};
    const Copula c_ref = reference_copula(config);
    for (const auto& p : contracts) {
        if (!p.has_form) continue;
        for (Norm n : norms) {
            std::vector<double> grid = explicit_eps.empty() ? config.uncertainty.epsilons : explicit_eps;
            if (grid.empty()) {
                const double sat = epsilon_max(p.form.points, c_ref, n).value;
                grid = default_epsilon_grid(config.uncertainty.gamma * sat, config.uncertainty.grid_points);
            }
            const auto rows = sweep(p.form, c_ref, n, grid, config.measures, threads);
            for (const auto& r : rows) {
                t.rows.push_back({p.config.name, r.measure, to_string(n), r.epsilon, r.lower, r.upper});
            }
        }
    }
    return t;
}

Table rcurve_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts) {
    Table t{"rcurve", {"contract", "copula", "m", "r_m"}, {}};
    const std::pair<const char*, Copula> copulas[] = {
        {"reference", reference_copula(config)},
        {"independence", Copula::independence()},
        {"comonotone", Copula::comonotone()},
        {"countermonotone", Copula::countermonotone()},
    };
    for (const auto& p : contracts) {
        if (!p.has_form) continue;
        for (const auto& [name, c] : copulas) {
            const auto r = r_curve(p.form, c);
            for (std::size_t m = 0; m < r.size(); ++m) {
                t.rows.push_back({p.config.name, std::string(name), static_cast<long>(m + 1), r[m]});
            }
        }
    }
    return t;
}

Table hlines_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts) {
    Table t{"hlines", {"contract", "measure", "label", "value"}, {}};
    const Copula c_ref = reference_copula(config);
    double tau = 0.0;
    if (config.uncertainty.kendall_tau) {
        tau = *config.uncertainty.kendall_tau;
    } else if (config.copula.family == "gumbel") {
        tau = gumbel_summaries(config.copula.delta).tau;
    } else if (config.copula.family == "comonotone") {
        tau = 1.0;
    } else if (config.copula.family == "countermonotone") {
        tau = -1.0;
    }
    const CopulaBounds band = tau_band_bounds(tau);
    for (const auto& p : contracts) {
        if (!p.has_form) continue;
        std::vector<UnitPoint> inner;
        for (const auto& q : p.form.points) {
            const auto& u = config.uncertainty;
            if (q.u >= u.tankov_min && q.u <= u.tankov_max && q.v >= u.tankov_min && q.v <= u.tankov_max) inner.push_back(q);
        }
        const CopulaBounds tankov = tankov_bounds(inner, c_ref);
        const std::pair<const char*, Copula> lines[] = {
            {"reference", c_ref},
            {"independence", Copula::independence()},
            {"fh_lower", Copula::countermonotone()},
            {"fh_upper", Copula::comonotone()},
            {"tau_band_lower", band.lower},
            {"tau_band_upper", band.upper},
            {"tankov_lower", tankov.lower},
            {"tankov_upper", tankov.upper},
        };
        for (const auto& h : config.measures) {
            for (const auto& [label, c] : lines) {
                t.rows.push_back({p.config.name, h.name(), std::string(label), evaluate(p.form, h, c)});
            }
        }
    }
    return t;
}

Table simulation_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts,
                       int threads, const std::function<void(const Table&)>& emit) {
    Table t{"simulation", {"contract", "measure", "analytic", "estimate", "standard_error", "samples"}, {}};
    const Copula c_ref = reference_copula(config);
    double alpha_var = 0.99;
    double alpha_es = 0.975;
    for (const auto& h : config.measures) {
        if (h.kind() == MeasureKind::VaR) alpha_var = h.alpha();
        if (h.kind() == MeasureKind::ES) alpha_es = h.alpha();
    }
    for (std::size_t i = 0; i < contracts.size(); ++i) {
        const auto& p = contracts[i];
        const std::uint64_t seed = splitmix64(config.seed + 0x1000 * (i + 1));
        const auto samples = sample_copula(c_ref, config.simulation.samples, seed, threads);
        const auto payoffs = simulate_payoffs(p.contract, p.x, p.y, samples);
        if (emit) {
            Table s{"samples_" + p.config.name, {"payoff"}, {}};
            s.rows.reserve(payoffs.size());
            for (double v : payoffs) s.rows.push_back({v});
            emit(s);
        }
        const auto est = empirical_measures(payoffs, alpha_var, alpha_es, config.simulation.bootstrap_resamples,
                                            splitmix64(seed));
        const auto exact = measures_from_discrete(contract_payoff_law(p.contract, p.x, p.y, c_ref), alpha_var, alpha_es);
        const long n = static_cast<long>(est.n);
        t.rows.push_back({p.config.name, std::string("mean"), exact.mean, est.mean, est.se_mean, n});
        t.rows.push_back({p.config.name, Distortion::var(alpha_var).name(), exact.var, est.var, est.se_var, n});
        t.rows.push_back({p.config.name, Distortion::es(alpha_es).name(), exact.es, est.es, est.se_es, n});
    }
    return t;
}

int run_subcommand(const std::string& sub, const ExperimentConfig& config, const RunOptions& options,
                   std::ostream& log) {
    const std::string dir = options.out_dir.empty() ? config.output_dir : options.out_dir;
    auto all = prepare_contracts(config);
    std::vector<PreparedContract> contracts;
    for (const auto& p : all) {
        if (!options.contract || p.config.name == *options.contract) contracts.push_back(p);
    }
    if (contracts.empty()) {
        log << "error: no contract named '" << options.contract.value_or("") << "'\n";
        return 2;
    }
    const std::vector<Norm> norms = options.norm ? std::vector<Norm>{*options.norm} : config.uncertainty.norms;
    const Copula c_ref = reference_copula(config);
    auto emit = [&](const Table& t) {
        write_table(t, dir, options.format);
        log << "wrote " << dir << "/" << t.name << (options.format == OutputFormat::Csv ? ".csv" : ".json") << "\n";
    };

    if (sub == "price") {
        const Table t = price_table(contracts, c_ref);
        for (const auto& row : t.rows) {
            log << format_cell(row[0]) << " " << format_cell(row[1]) << " " << format_cell(row[2]) << "\n";
        }
        emit(t);
    } else if (sub == "calibrate") {
        const Table t = calibration_table(contracts);
        for (const auto& row : t.rows) log << format_cell(row[0]) << " level=" << format_cell(row[1]) << "\n";
        emit(t);
    } else if (sub == "bounds") {
        if (options.eps.empty() && config.uncertainty.epsilons.empty()) {
            log << "error: bounds needs --eps or uncertainty.epsilons\n";
            return 2;
        }
        Table t = sweep_table(config, contracts, norms, options.eps, options.threads);
        t.name = "bounds";
        emit(t);
    } else if (sub == "sweep") {
        emit(sweep_table(config, contracts, norms, options.eps, options.threads));
    } else if (sub == "epsmax") {
        emit(epsmax_table(config, contracts, norms));
    } else if (sub == "rcurve") {
        emit(rcurve_table(config, contracts));
    } else if (sub == "simulate") {
        emit(simulation_table(config, contracts, options.threads, emit));
    } else if (sub == "reproduce-paper") {
        emit(calibration_table(contracts));
        emit(price_table(contracts, c_ref));
        emit(epsmax_table(config, contracts, norms));
        emit(sweep_table(config, contracts, norms, options.eps, options.threads));
        emit(hlines_table(config, contracts));
        emit(rcurve_table(config, contracts));
        emit(simulation_table(config, contracts, options.threads, emit));
    } else {
        log << "error: unknown subcommand '" << sub << "'\n";
        return 2;
    }
    std::filesystem::create_directories(dir);
    std::ofstream(dir + "/effective_config.json", std::ios::binary) << dump_config(config);
    return 0;
}

}  // namespace jlrisk
