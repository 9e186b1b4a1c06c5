#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "idyn/analysis.hpp"
#include "idyn/config.hpp"
#include "idyn/dynamics.hpp"
#include "idyn/integrators.hpp"
#include "idyn/lyapunov.hpp"
#include "idyn/objectives.hpp"
#include "idyn/perturbations.hpp"

namespace idyn {

struct EnergyRequest {
    std::string name;       // W | fast | eps | lambda | sc | implicit-convex
    double eps = -1.0;      // defaults to (alpha-3)/2 when negative
    double lambda = 2.0;
    double b = -1.0;        // implicit-convex b; defaults to (alpha+1)/2
    double rel_tol = -1.0;  // monotonicity tolerance; defaults per energy
};

/// Fully deterministic description of one run. Built from / serialized to the
/// key = value config format (see ConfigValue).
struct ScenarioConfig {
    std::string name = "scenario";
    // objective
    std::string objective_id = "quartic";  // quartic | quartic-l1 | quadratic-sc
    double objective_mu = 1.0;
    Vec objective_xstar;          // quadratic-sc center
    double objective_weight = 0.1;  // l1 weight of quartic-l1
    // system
    SystemSpec system;
    std::string form = "auto";  // auto | second-order | first-order
    // perturbation
    std::string perturbation_kind = "zero";  // zero | cosine-decay
    double perturbation_delta = 3.1;
    std::vector<int> perturbation_components;  // empty = all
    // integrator
    std::string integrator_kind = "rk45";  // rk45 | prox
    IntegratorConfig integrator;
    double prox_h = 1e-3;
    int output_samples = 2000;  // <= 0: adaptive (every accepted step)
    // initial data and horizon
    Vec x0{-10.0, 20.0};
    Vec v0{5.0, -5.0};
    double horizon = 50.0;
    // energies and certification
    std::vector<EnergyRequest> energies;
    bool certify = true;
};

ScenarioConfig scenario_from_config(const ConfigValue& root);
ConfigValue scenario_to_config(const ScenarioConfig& cfg);

struct EnergyResult {
    EnergyTrace trace;
    double rel_tol = 1e-6;
    bool certified = false;  // no violations past t1
};

struct RunResult {
    ScenarioConfig cfg;
    Objective objective;
    PerturbationSignal signal;
    Trajectory trajectory;
    double fbar = 0.0;
    Vec xstar;
    RateReport rate;                       // f_gap slope over [T/5, T]
    std::optional<RateReport> rate_extrap;  // implicit family: f at x + beta(t)*xdot
    std::map<std::string, EnergyResult> energies;
    std::optional<ScBoundReport> sc_bound;
    std::vector<std::string> warnings;
    std::vector<std::string> certification_failures;
    std::string hypothesis_note;

    bool all_certified() const { return certification_failures.empty(); }
};

/// Validate, integrate, evaluate energies, fit rates and write
/// trajectory.csv / energy_<name>.csv / report.csv / plot.gp into out_dir
/// (skipped when out_dir is empty). Deterministic: identical configs produce
/// byte-identical artifacts.
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

/// The full experiment grid of the reproduction study: {explicit, implicit}
/// smooth systems on the quartic and both inclusions on the l1 variant, each
/// with decay exponents {0.1, 1.1, 3.1}; emits per-run artifact directories
/// plus a combined summary.csv. Returns the run results keyed by run name.
std::map<std::string, RunResult> reproduce_section6(const std::string& out_dir);

/// The scenario configs used by reproduce_section6, keyed by run name.
std::vector<ScenarioConfig> section6_grid();

/// Build the objective / signal described by a ScenarioConfig.
Objective make_objective(const ScenarioConfig& cfg);
PerturbationSignal make_signal(const ScenarioConfig& cfg);

}  // namespace idyn
