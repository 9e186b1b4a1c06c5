#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "idyn/analysis.hpp"
#include "idyn/config.hpp"
#include "idyn/scenario.hpp"

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    int column_index(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv " + path);
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    table.columns.resize(table.header.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t c = 0;
        while (std::getline(ls, cell, ',') && c < table.columns.size()) {
            try {
                table.columns[c].push_back(std::stod(cell));
            } catch (...) {
                table.columns[c].push_back(0.0);
            }
            ++c;
        }
    }
    return table;
}

int run_simulate(const std::string& config_path, const std::string& out_dir, bool certify_gate) {
    idyn::ScenarioConfig cfg =
        idyn::scenario_from_config(idyn::ConfigValue::parse_file(config_path));
    idyn::RunResult result = idyn::run_scenario(cfg, out_dir);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "run " << cfg.name << ": slope " << result.rate.slope << " ("
              << idyn::to_string(result.rate.classification) << "), " << result.hypothesis_note
              << "\n";
    for (const auto& [name, er] : result.energies)
        std::cout << "  energy " << name << ": t1 = " << er.trace.t1 << ", violations = "
                  << er.trace.violations.size() << "\n";
    if (!result.all_certified()) {
        for (const auto& f : result.certification_failures)
            std::cout << "  certification failure: " << f << "\n";
        if (certify_gate || cfg.certify) return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and certification lab for perturbed inertial dynamics "
                 "with Hessian-driven damping"};
    app.require_subcommand(1);

    std::string config_path, out_dir, input_csv, column = "f_gap", window = "10:50";

    auto* simulate = app.add_subcommand("simulate", "integrate one scenario and emit artifacts");
    simulate->add_option("--config", config_path, "scenario config file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();

    auto* repro = app.add_subcommand("reproduce-sec6",
                                     "run the 12-run experiment grid and emit a summary table");
    repro->add_option("--out", out_dir, "output directory")->required();

    auto* rates = app.add_subcommand("rates", "fit a log-log rate on a trajectory csv column");
    rates->add_option("--input", input_csv, "trajectory.csv path")->required();
    rates->add_option("--col", column, "column to fit (default f_gap)");
    rates->add_option("--window", window, "time window lo:hi (default 10:50)");

    auto* certify = app.add_subcommand("certify", "run a scenario; exit code reflects certification");
    certify->add_option("--config", config_path, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(config_path, out_dir, false);
        if (certify->parsed()) return run_simulate(config_path, "", true);
        if (repro->parsed()) {
            auto results = idyn::reproduce_section6(out_dir);
            std::cout << "wrote " << results.size() << " runs under " << out_dir << "\n";
            for (const auto& [name, r] : results)
                std::cout << "  " << name << ": slope " << r.rate.slope << " ("
                          << idyn::to_string(r.rate.classification) << ")\n";
            return 0;
        }
        if (rates->parsed()) {
            CsvTable table = read_csv(input_csv);
            const int tcol = table.column_index("t");
            const int vcol = table.column_index(column);
            if (tcol < 0 || vcol < 0) {
                std::cerr << "column not found: " << (tcol < 0 ? "t" : column) << "\n";
                return 2;
            }
            double lo = 10.0, hi = 50.0;
            if (std::sscanf(window.c_str(), "%lf:%lf", &lo, &hi) != 2) {
                std::cerr << "bad window, expected lo:hi\n";
                return 2;
            }
            idyn::RateReport r =
                idyn::fit_rate_resampled(table.columns[tcol], table.columns[vcol], lo, hi);
            std::cout << "window_lo,window_hi,slope,intercept,residual_rms,classification\n";
            std::cout << r.t_lo << "," << r.t_hi << "," << r.slope << "," << r.intercept << ","
                      << r.residual_rms << "," << idyn::to_string(r.classification) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
