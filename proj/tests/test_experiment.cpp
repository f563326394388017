#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "jlrisk/experiment.hpp"

using namespace jlrisk;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("jlrisk_test_" + name);
    fs::remove_all(d);
    return d;
}

// The bundled experiment shrunk so that a full run takes well under a second.
ExperimentConfig small_config() {
    auto c = bundled_config();
    c.uncertainty.grid_points = 6;
    c.uncertainty.family_delta_count = 5;
    c.simulation.samples = 20000;
    c.simulation.bootstrap_resamples = 20;
    return c;
}

std::string expect_config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    ADD_FAILURE() << "config was accepted: " << text;
    return {};
}

}  // namespace

TEST(Experiment, BundledConfigMatchesShippedFile) {
    const auto shipped = load_config(std::string(JLRISK_SOURCE_DIR) + "/config/paper.json");
    EXPECT_EQ(dump_config(shipped), dump_config(bundled_config()));
    const auto c = bundled_config();
    ASSERT_EQ(c.contracts.size(), 4u);
    EXPECT_EQ(c.contracts[0].name, "F2DA");
    EXPECT_TRUE(c.contracts[0].calibration_anchor);
    EXPECT_EQ(c.seed, 20240601u);
    EXPECT_EQ(c.measures.size(), 3u);
}

TEST(Experiment, ConfigRoundTrip) {
    const auto c = bundled_config();
    EXPECT_EQ(dump_config(parse_config(dump_config(c))), dump_config(c));
}

TEST(Experiment, ConfigErrorsNameTheField) {
    auto patched = [](const std::function<void(nlohmann::json&)>& f) {
        auto j = nlohmann::json::parse(bundled_config_text());
        f(j);
        return j.dump();
    };
    EXPECT_NE(expect_config_error(patched([](auto& j) { j["lives"]["x"]["dispersion_years"] = -1; }))
                  .find("lives.x.dispersion_years"),
              std::string::npos);
    EXPECT_NE(expect_config_error(patched([](auto& j) { j["contracts"][1]["kind"] = "tontine"; })).find("contracts"),
              std::string::npos);
    EXPECT_NE(expect_config_error(patched([](auto& j) { j["copula"]["delta"] = 0.5; })).find("copula.delta"),
              std::string::npos);
    EXPECT_NE(expect_config_error(patched([](auto& j) { j["uncertainty"]["norms"] = {"l2"}; })).find("uncertainty.norms"),
              std::string::npos);
    EXPECT_NE(expect_config_error(patched([](auto& j) { j["measures"][1]["alpha"] = 1.5; })).find("measures"),
              std::string::npos);
    EXPECT_FALSE(expect_config_error("{not json").empty());
}

TEST(Experiment, CalibrationAndPrices) {
    const auto config = bundled_config();
    const auto contracts = prepare_contracts(config);
    ASSERT_EQ(contracts.size(), 4u);
    EXPECT_EQ(contracts[0].level, 1.0);
    EXPECT_NEAR(contracts[1].level, 1.169, 0.005);
    const double anchor = contracts[0].price_form.evaluate(Copula::independence());
    for (const auto& p : contracts) EXPECT_NEAR(p.price_form.evaluate(Copula::independence()), anchor, 1e-9);

    const Copula ref = reference_copula(config);
    const auto law = contract_payoff_law(contracts[0].contract, contracts[0].x, contracts[0].y, ref);
    const auto t = price_table(contracts, ref);
    double price_ref = 0.0;
    for (const auto& row : t.rows)
        if (std::get<std::string>(row[0]) == "F2DA" && std::get<std::string>(row[1]) == "reference")
            price_ref = std::get<double>(row[2]);
    EXPECT_NEAR(price_ref, distortion_integral(law, Distortion::mean()), 1e-9);
}

TEST(Experiment, ZeroRadiusSweepCollapsesToReference) {
    const auto config = bundled_config();
    const auto contracts = prepare_contracts(config);
    const Copula ref = reference_copula(config);
    const auto t = sweep_table(config, contracts, {Norm::L1}, {0.0}, 2);
    ASSERT_EQ(t.rows.size(), 4u * 3u);
    for (const auto& row : t.rows) {
        const auto& name = std::get<std::string>(row[0]);
        const Distortion h = parse_distortion(std::get<std::string>(row[1]));
        const PreparedContract* p = nullptr;
        for (const auto& c : contracts)
            if (c.config.name == name) p = &c;
        ASSERT_NE(p, nullptr);
        const double value = evaluate(p->form, h, ref);
        EXPECT_NEAR(std::get<double>(row[4]), value, 1e-8) << name << " " << h.name();
        EXPECT_NEAR(std::get<double>(row[5]), value, 1e-8) << name << " " << h.name();
    }
}

TEST(Experiment, ReproduceIsByteIdentical) {
    const auto config = small_config();
    std::ostringstream log;
    const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
    RunOptions oa;
    oa.out_dir = a.string();
    oa.threads = 1;
    RunOptions ob = oa;
    ob.out_dir = b.string();
    ob.threads = 3;
    ASSERT_EQ(run_subcommand("reproduce-paper", config, oa, log), 0);
    ASSERT_EQ(run_subcommand("reproduce-paper", config, ob, log), 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
    }
    for (const char* f : {"calibration.csv", "prices.csv", "epsmax.csv", "sweep.csv", "hlines.csv", "rcurve.csv",
                          "simulation.csv", "samples_F2DA.csv", "effective_config.json"}) {
        EXPECT_TRUE(fs::exists(a / f)) << f;
    }
    EXPECT_GE(files, 9u);
    const std::string header = slurp(a / "sweep.csv").substr(0, slurp(a / "sweep.csv").find('\n'));
    EXPECT_EQ(header, "contract,measure,norm,epsilon,lower,upper");
    const std::string hl = slurp(a / "hlines.csv");
    EXPECT_EQ(hl.substr(0, hl.find('\n')), "contract,measure,label,value");
    EXPECT_NE(hl.find("tau_band_upper"), std::string::npos);
}

TEST(Experiment, JsonFormatAndSubcommands) {
    const auto config = small_config();
    std::ostringstream log;
    const fs::path d = fresh_dir("json");
    RunOptions o;
    o.out_dir = d.string();
    o.format = OutputFormat::Json;
    o.contract = "S2DI";
    o.norm = Norm::Linf;
    o.eps = {0.0, 0.01};
    ASSERT_EQ(run_subcommand("bounds", config, o, log), 0);
    const auto j = nlohmann::json::parse(slurp(d / "bounds.json"));
    ASSERT_EQ(j.size(), 2u * 3u);
    EXPECT_EQ(j[0]["contract"], "S2DI");
    EXPECT_EQ(j[0]["norm"], "linf");
    EXPECT_LE(j[5]["lower"].get<double>(), j[5]["upper"].get<double>());
    EXPECT_EQ(run_subcommand("frobnicate", config, o, log), 2);
    o.contract = "nope";
    EXPECT_EQ(run_subcommand("price", config, o, log), 2);
    o.contract.reset();
    o.eps.clear();
    EXPECT_EQ(run_subcommand("bounds", config, o, log), 2);
}

TEST(Experiment, FormatCell) {
    EXPECT_EQ(format_cell(Table::Cell{0.1}), "0.1");
    EXPECT_EQ(format_cell(Table::Cell{1.0 / 3.0}), "0.333333333333");
    EXPECT_EQ(format_cell(Table::Cell{7L}), "7");
    EXPECT_EQ(format_cell(Table::Cell{std::string("x")}), "x");
}

TEST(Experiment, CommandLine) {
    const fs::path d = fresh_dir("cli");
    const std::string cli = JLRISK_CLI;
    const std::string ok = cli + " calibrate --out " + d.string() + " > /dev/null 2>&1";
    EXPECT_EQ(std::system(ok.c_str()), 0);
    EXPECT_TRUE(fs::exists(d / "calibration.csv"));
    const std::string bad = cli + " sweep --config " + std::string(JLRISK_SOURCE_DIR) +
                            "/tests/data/bad_config.json --out " + d.string() + " > /dev/null 2>&1";
    EXPECT_NE(std::system(bad.c_str()), 0);
    const std::string bad_norm = cli + " sweep --norm l7 --out " + d.string() + " > /dev/null 2>&1";
    EXPECT_NE(std::system(bad_norm.c_str()), 0);
}
