#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jlrisk/bounds.hpp"
#include "jlrisk/canonical.hpp"
#include "jlrisk/contracts.hpp"
#include "jlrisk/copulas.hpp"
#include "jlrisk/marginals.hpp"
#include "jlrisk/riskmeasures.hpp"

namespace jlrisk {

struct LifeConfig {
    double mode_years = 0.0;
    double dispersion_years = 0.0;
};

struct ContractConfig {
    std::string name;
    ContractKind kind = ContractKind::JointLifeAnnuity;
    double entry_age_x = 0.0;
    double entry_age_y = 0.0;
    /// Empty: calibrated against the anchor.
    std::optional<double> level;
    /// Empty: whole life.
    std::optional<int> term_years;
    double interest_rate = 0.05;
    bool calibration_anchor = false;
};

struct CopulaConfig {
    std::string family = "gumbel";  // gumbel | independence | comonotone | countermonotone
    double delta = 1.0;
    bool survival = true;
};

struct UncertaintyConfig {
    std::vector<Norm> norms{Norm::L1, Norm::Linf};
    /// Explicit grid; empty means the default log grid up to gamma * saturation.
    std::vector<double> epsilons;
    int grid_points = 60;
    double gamma = 1.0;
    double family_delta_min = 1.90;
    double family_delta_max = 2.02;
    int family_delta_count = 121;
    double tankov_min = 0.2;
    double tankov_max = 0.8;
    /// Kendall's tau for the band bounds; empty uses the reference copula's.
    std::optional<double> kendall_tau;
};

struct SimulationConfig {
    std::size_t samples = 1000000;
    int bootstrap_resamples = 200;
};

struct ExperimentConfig {
    LifeConfig x;
    LifeConfig y;
    double max_age_years = 115.0;
    std::vector<ContractConfig> contracts;
    CopulaConfig copula;
    UncertaintyConfig uncertainty;
    std::vector<Distortion> measures{Distortion::mean(), Distortion::var(0.99), Distortion::es(0.975)};
    SimulationConfig simulation;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
};

/// Parses a JSON config; missing optional blocks take defaults. Throws
/// std::invalid_argument naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Effective config (all defaults applied) as pretty-printed JSON.
std::string dump_config(const ExperimentConfig& config);

/// The bundled four-contract joint-life experiment.
const std::string& bundled_config_text();
ExperimentConfig bundled_config();

Copula reference_copula(const ExperimentConfig& config);

struct PreparedContract {
    ContractConfig config;
    GompertzMarginal x;
    GompertzMarginal y;
    Contract contract;  // level applied
    double level = 1.0;
    PriceLinearForm price_form;
    bool single_statistic = false;
    PayoffSpec spec;          // single-statistic contracts only
    CanonicalForm form;       // monotone single-statistic contracts only
    bool has_form = false;
};

/// Builds marginals, resolves whole-life terms and calibrates missing levels
/// so every contract has the anchor's independence price.
std::vector<PreparedContract> prepare_contracts(const ExperimentConfig& config);

/// Exact law of the payoff of any contract, by enumerating the joint law of
/// the curtate lifetimes.
std::vector<Atom> contract_payoff_law(const Contract& contract, const GompertzMarginal& x,
                                      const GompertzMarginal& y, const Copula& c);

/// A flat result table written as CSV or JSON.
struct Table {
    using Cell = std::variant<std::string, double, long>;
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { Csv, Json };

/// "%.12g" for doubles.
std::string format_cell(const Table::Cell& cell);
void write_table(const Table& table, const std::string& dir, OutputFormat format);

struct RunOptions {
    std::string out_dir;
    OutputFormat format = OutputFormat::Csv;
    int threads = 1;
    std::optional<Norm> norm;
    std::vector<double> eps;
    std::optional<std::string> contract;
};

Table calibration_table(const std::vector<PreparedContract>& contracts);
Table price_table(const std::vector<PreparedContract>& contracts, const Copula& c_ref);
Table epsmax_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts,
                   const std::vector<Norm>& norms);
Table sweep_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts,
                  const std::vector<Norm>& norms, const std::vector<double>& explicit_eps, int threads);
Table rcurve_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts);
Table hlines_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts);
/// Writes samples_<contract> tables through `emit` and returns the summary.
Table simulation_table(const ExperimentConfig& config, const std::vector<PreparedContract>& contracts,
                       int threads, const std::function<void(const Table&)>& emit);

/// Runs one subcommand and writes its artifacts. Returns the process exit code.
int run_subcommand(const std::string& subcommand, const ExperimentConfig& config,
                   const RunOptions& options, std::ostream& log);

}  // namespace jlrisk
