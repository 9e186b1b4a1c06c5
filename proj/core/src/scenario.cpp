#include "idyn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace idyn {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::vector<double> uniform_grid(double t0, double T, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = t0 + (T - t0) * i / (n - 1);
    g.back() = T;
    return g;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

Objective make_objective(const ScenarioConfig& cfg) {
    if (cfg.objective_id == "quartic") return make_quartic();
    if (cfg.objective_id == "quartic-l1") return make_quartic_l1(cfg.objective_weight);
    if (cfg.objective_id == "quadratic-sc") {
        Vec xstar = cfg.objective_xstar;
        if (xstar.empty()) xstar = Vec{0.0, 0.0};
        return make_quadratic_sc(cfg.objective_mu, xstar);
    }
    throw std::invalid_argument("unknown objective id: " + cfg.objective_id);
}

PerturbationSignal make_signal(const ScenarioConfig& cfg) {
    const Objective obj = make_objective(cfg);
    if (cfg.perturbation_kind == "zero") return zero_signal(obj.dimension);
    if (cfg.perturbation_kind == "cosine-decay")
        return cosine_decay(cfg.perturbation_delta, obj.dimension, std::min(1.0, cfg.system.t0),
                            cfg.perturbation_components);
    throw std::invalid_argument("unknown perturbation kind: " + cfg.perturbation_kind);
}

ScenarioConfig scenario_from_config(const ConfigValue& root) {
    ScenarioConfig cfg;
    cfg.name = root.string_or("name", cfg.name);

    if (root.contains("objective")) {
        const auto& o = root.at("objective");
        cfg.objective_id = o.string_or("id", cfg.objective_id);
        cfg.objective_mu = o.number_or("mu", cfg.objective_mu);
        cfg.objective_weight = o.number_or("weight", cfg.objective_weight);
        if (o.contains("xstar")) cfg.objective_xstar = o.at("xstar").as_vector();
    }
    if (root.contains("system")) {
        const auto& s = root.at("system");
        cfg.system.kind = system_kind_from_string(s.string_or("kind", "isehd"));
        cfg.system.alpha = s.number_or("alpha", cfg.system.alpha);
        cfg.system.beta = s.number_or("beta", cfg.system.beta);
        cfg.system.gamma = s.number_or("gamma", cfg.system.gamma);
        cfg.system.t0 = s.number_or("t0", cfg.system.t0);
        cfg.form = s.string_or("form", cfg.form);
    }
    if (root.contains("perturbation")) {
        const auto& p = root.at("perturbation");
        cfg.perturbation_kind = p.string_or("kind", cfg.perturbation_kind);
        cfg.perturbation_delta = p.number_or("delta", cfg.perturbation_delta);
        if (p.contains("components") && p.at("components").type() == ConfigValue::Type::Array) {
            for (const auto& item : p.at("components").as_array())
                cfg.perturbation_components.push_back(static_cast<int>(item.as_number()));
        }
    }
    if (root.contains("integrator")) {
        const auto& it = root.at("integrator");
        cfg.integrator_kind = it.string_or("kind", cfg.integrator_kind);
        cfg.integrator.rel_tol = it.number_or("rel_tol", cfg.integrator.rel_tol);
        cfg.integrator.abs_tol = it.number_or("abs_tol", cfg.integrator.abs_tol);
        cfg.integrator.h_max = it.number_or("h_max", cfg.integrator.h_max);
        cfg.prox_h = it.number_or("h", cfg.prox_h);
        if (it.contains("output")) {
            const auto& out = it.at("output");
            if (out.string_or("kind", "uniform") == "adaptive")
                cfg.output_samples = 0;
            else
                cfg.output_samples = static_cast<int>(out.number_or("n", cfg.output_samples));
        }
    }
    if (root.contains("initial")) {
        const auto& init = root.at("initial");
        if (init.contains("x0")) cfg.x0 = init.at("x0").as_vector();
        if (init.contains("v0")) cfg.v0 = init.at("v0").as_vector();
    }
    cfg.horizon = root.number_or("horizon", cfg.horizon);
    if (root.contains("energies")) {
        for (const auto& e : root.at("energies").as_array()) {
            EnergyRequest req;
            req.name = e.at("name").as_string();
            req.eps = e.number_or("eps", req.eps);
            req.lambda = e.number_or("lambda", req.lambda);
            req.b = e.number_or("b", req.b);
            req.rel_tol = e.number_or("rel_tol", req.rel_tol);
            cfg.energies.push_back(std::move(req));
        }
    }
    cfg.certify = root.boolean_or("certify", cfg.certify);
    return cfg;
}

ConfigValue scenario_to_config(const ScenarioConfig& cfg) {
    ConfigValue root = ConfigValue::table();
    root["name"] = ConfigValue::string(cfg.name);
    ConfigValue obj = ConfigValue::table();
    obj["id"] = ConfigValue::string(cfg.objective_id);
    if (cfg.objective_id == "quadratic-sc") {
        obj["mu"] = ConfigValue::number(cfg.objective_mu);
        std::vector<ConfigValue> xs;
        for (double v : cfg.objective_xstar) xs.push_back(ConfigValue::number(v));
        obj["xstar"] = ConfigValue::array(std::move(xs));
    }
    if (cfg.objective_id == "quartic-l1") obj["weight"] = ConfigValue::number(cfg.objective_weight);
    root["objective"] = obj;

    ConfigValue sys = ConfigValue::table();
    sys["kind"] = ConfigValue::string(to_string(cfg.system.kind));
    sys["alpha"] = ConfigValue::number(cfg.system.alpha);
    sys["beta"] = ConfigValue::number(cfg.system.beta);
    sys["gamma"] = ConfigValue::number(cfg.system.gamma);
    sys["t0"] = ConfigValue::number(cfg.system.t0);
    sys["form"] = ConfigValue::string(cfg.form);
    root["system"] = sys;

    ConfigValue pert = ConfigValue::table();
    pert["kind"] = ConfigValue::string(cfg.perturbation_kind);
    if (cfg.perturbation_kind == "cosine-decay")
        pert["delta"] = ConfigValue::number(cfg.perturbation_delta);
    if (!cfg.perturbation_components.empty()) {
        std::vector<ConfigValue> comps;
        for (int c : cfg.perturbation_components) comps.push_back(ConfigValue::number(c));
        pert["components"] = ConfigValue::array(std::move(comps));
    }
    root["perturbation"] = pert;

    ConfigValue integ = ConfigValue::table();
    integ["kind"] = ConfigValue::string(cfg.integrator_kind);
    integ["rel_tol"] = ConfigValue::number(cfg.integrator.rel_tol);
    integ["abs_tol"] = ConfigValue::number(cfg.integrator.abs_tol);
    integ["h"] = ConfigValue::number(cfg.prox_h);
    ConfigValue out = ConfigValue::table();
    out["kind"] = ConfigValue::string(cfg.output_samples > 0 ? "uniform" : "adaptive");
    if (cfg.output_samples > 0) out["n"] = ConfigValue::number(cfg.output_samples);
    integ["output"] = out;
    root["integrator"] = integ;

    ConfigValue init = ConfigValue::table();
    std::vector<ConfigValue> x0s, v0s;
    for (double v : cfg.x0) x0s.push_back(ConfigValue::number(v));
    for (double v : cfg.v0) v0s.push_back(ConfigValue::number(v));
    init["x0"] = ConfigValue::array(std::move(x0s));
    init["v0"] = ConfigValue::array(std::move(v0s));
    root["initial"] = init;
    root["horizon"] = ConfigValue::number(cfg.horizon);

    std::vector<ConfigValue> energies;
    for (const auto& req : cfg.energies) {
        ConfigValue e = ConfigValue::table();
        e["name"] = ConfigValue::string(req.name);
        if (req.eps >= 0.0) e["eps"] = ConfigValue::number(req.eps);
        if (req.name == "lambda") e["lambda"] = ConfigValue::number(req.lambda);
        if (req.b >= 0.0) e["b"] = ConfigValue::number(req.b);
        if (req.rel_tol >= 0.0) e["rel_tol"] = ConfigValue::number(req.rel_tol);
        energies.push_back(std::move(e));
    }
    root["energies"] = ConfigValue::array(std::move(energies));
    root["certify"] = ConfigValue::boolean(cfg.certify);
    return root;
}

namespace {

void validate_energy_requests(const ScenarioConfig& cfg) {
    for (const auto& req : cfg.energies) {
        if (req.name == "fast" || req.name == "eps" || req.name == "implicit-convex") {
            if (!(cfg.system.alpha > 3.0))
                throw std::invalid_argument("config: energy '" + req.name +
                                            "' requires the hypothesis alpha > 3");
        }
        if (req.name == "lambda") {
            if (!(cfg.system.alpha >= 3.0))
                throw std::invalid_argument("config: energy 'lambda' requires alpha >= 3");
            const double lam = req.lambda;
            if (!(lam >= 2.0 && lam <= cfg.system.alpha - 1.0))
                throw std::invalid_argument("config: lambda must lie in [2, alpha-1]");
        }
        if (req.name == "sc" &&
            !(cfg.system.kind == SystemKind::HbExplicit || cfg.system.kind == SystemKind::HbImplicit))
            throw std::invalid_argument("config: energy 'sc' applies to heavy-ball systems");
    }
}

std::string csv_trajectory(const RunResult& r, const std::vector<double>& extrap_gap) {
    const Trajectory& traj = r.trajectory;
    const int n = r.objective.dimension;
    std::string header = "t";
    for (int k = 0; k < n; ++k) header += ",x" + std::to_string(k + 1);
    const char* comp = traj.companion_kind == CompanionKind::Velocity ? "v" : "y";
    for (int k = 0; k < n; ++k) header += "," + std::string(comp) + std::to_string(k + 1);
    header += ",f_gap,grad_norm,dist";
    // the extrapolated column carries f at x + beta(t)*xdot, the quantity the
    // implicit-damping estimates control
    if (!extrap_gap.empty()) header += ",f_gap_extrap";

    std::string out = header + "\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out += fmt(traj.times[i]);
        for (int k = 0; k < n; ++k) out += "," + fmt(traj.x[i][k]);
        for (int k = 0; k < n; ++k) out += "," + fmt(traj.companion[i][k]);
        out += "," + fmt(traj.f_gap[i]);
        out += "," + fmt(traj.grad_norm[i]);
        out += "," + fmt(norm(sub(traj.x[i], r.xstar)));
        if (!extrap_gap.empty()) out += "," + fmt(extrap_gap[i]);
        out += "\n";
    }
    return out;
}

std::vector<double> extrapolated_gap(const RunResult& r) {
    const Trajectory& traj = r.trajectory;
    const SystemSpec& spec = r.cfg.system;
    std::vector<double> gap(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        Vec y;
        if (traj.companion_kind == CompanionKind::Auxiliary) {
            y = traj.companion[i];  // y = x + beta(t)*xdot by construction
        } else {
            const double bt = spec.kind == SystemKind::HbImplicit
                                  ? spec.beta
                                  : beta_schedule(spec, traj.times[i]).first;
            y = traj.x[i];
            axpy(y, bt, traj.companion[i]);
        }
        gap[i] = value(r.objective, y) - r.fbar;
    }
    return gap;
}

std::string csv_energy(const EnergyTrace& trace) {
    std::string out = "t,value,tail_integral\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        out += fmt(trace.times[i]) + "," + fmt(trace.values[i]) + "," +
               fmt(trace.tail_integrals[i]) + "\n";
    return out;
}

std::string plot_script(const RunResult& r) {
    std::string gp;
    gp += "# gnuplot script; log-log objective gap, semilog distance\n";
    gp += "set datafile separator ','\n";
    gp += "set key autotitle columnhead\n";
    gp += "set terminal pngcairo size 1200,500\n";
    gp += "set output 'run.png'\n";
    gp += "set multiplot layout 1,2\n";
    gp += "set logscale xy\nset xlabel 't'\nset ylabel 'f(x(t)) - fbar'\n";
    gp += "plot 'trajectory.csv' using 1:(column('f_gap')>0?column('f_gap'):NaN) with lines\n";
    gp += "unset logscale\nset logscale y\nset ylabel '|x(t) - xstar|'\n";
    gp += "plot 'trajectory.csv' using 1:(column('dist')>0?column('dist'):NaN) with lines\n";
    gp += "unset multiplot\n";
    return gp;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
    RunResult result;
    result.cfg = cfg;
    result.objective = make_objective(cfg);
    result.signal = make_signal(cfg);
    validate_energy_requests(cfg);
    result.warnings = validate(cfg.system, result.objective);

    const double t0 = cfg.system.t0;
    const double T = cfg.horizon;
    if (!(T > t0)) throw std::invalid_argument("config: horizon must exceed t0");
    std::vector<double> grid;
    if (cfg.output_samples > 0) grid = uniform_grid(t0, T, cfg.output_samples);

    // reference minimum: known for the smooth built-ins, polish otherwise
    if (result.objective.known_min_value) {
        result.fbar = *result.objective.known_min_value;
        result.xstar = *result.objective.known_minimizer;
    } else {
        Vec start(result.objective.dimension, 0.0);
        result.xstar = prox_polish(result.objective, start, 10.0, 1e-13);
        result.fbar = value(result.objective, result.xstar);
        result.objective.known_minimizer = result.xstar;
        result.objective.known_min_value = result.fbar;
    }

    // integrate
    const bool inclusion = cfg.system.is_inclusion();
    if (inclusion || cfg.integrator_kind == "prox") {
        if (!inclusion)
            throw std::invalid_argument("config: prox integrator applies to inclusion systems");
        auto [x0, y0] = lift_initial(cfg.system, result.objective, result.signal, cfg.x0, cfg.v0);
        result.trajectory =
            cfg.system.kind == SystemKind::IsehdInclusion
                ? integrate_prox_explicit(cfg.system, result.objective, result.signal, t0, T, x0,
                                          y0, cfg.prox_h, grid)
                : integrate_prox_implicit(cfg.system, result.objective, result.signal, t0, T, x0,
                                          y0, cfg.prox_h, grid);
    } else {
        IntegratorConfig icfg = cfg.integrator;
        icfg.output_times = grid;
        const bool first_order = cfg.form == "first-order";
        if (cfg.form != "auto" && cfg.form != "first-order" && cfg.form != "second-order")
            throw std::invalid_argument("config: form must be auto|first-order|second-order");
        result.trajectory = integrate_system(cfg.system, result.objective, result.signal, T,
                                             cfg.x0, cfg.v0, icfg, first_order);
    }
    finalize_trajectory(result.trajectory, result.objective, result.fbar);

    // rate fit over the default window [T/5, T] on the 200-point log resample;
    // a gap that is identically zero (exact equilibrium) has no rate to fit
    bool any_gap = false;
    for (double g : result.trajectory.f_gap) any_gap = any_gap || g > 1e-300;
    if (any_gap) {
        result.rate =
            fit_rate_resampled(result.trajectory.times, result.trajectory.f_gap, T / 5.0, T);
    } else {
        result.rate.t_lo = T / 5.0;
        result.rate.t_hi = T;
        result.rate.classification = RateClass::Stagnant;
    }
    const bool implicit_family = cfg.system.kind == SystemKind::Isihd ||
                                 cfg.system.kind == SystemKind::HbImplicit ||
                                 cfg.system.kind == SystemKind::IsihdInclusion;
    std::vector<double> extrap_gap;
    if (implicit_family) {
        extrap_gap = extrapolated_gap(result);
        result.rate_extrap =
            fit_rate_resampled(result.trajectory.times, extrap_gap, T / 5.0, T);
    }

    // integrability diagnosis for the active rate hypothesis
    if (result.signal.is_zero()) {
        result.hypothesis_note = "unperturbed";
    } else {
        const double p = cfg.system.is_explicit_family() ? 1.0 : 2.0;
        const Integrability cls = classify_integrability(result.signal, p);
        result.hypothesis_note = std::string("moment p=") + fmt(p) + " " + to_string(cls);
        if (cls != Integrability::Converged)
            result.hypothesis_note += " (decrease/rate hypotheses not satisfied)";
    }

    // energies
    for (const auto& req : cfg.energies) {
        EnergyResult er;
        er.rel_tol = req.rel_tol >= 0.0 ? req.rel_tol : (req.name == "lambda" ? 1e-5 : 1e-6);
        const double alpha = cfg.system.alpha, beta = cfg.system.beta;
        const Vec& xstar = result.xstar;
        if (req.name == "W") {
            er.trace = energy_W(result.trajectory, result.objective, result.signal, alpha, beta);
        } else if (req.name == "fast") {
            er.trace =
                energy_fast(result.trajectory, result.objective, result.signal, alpha, beta, xstar);
        } else if (req.name == "eps") {
            const double eps = req.eps >= 0.0 ? req.eps : 0.5 * (alpha - 3.0);
            er.trace = energy_eps(result.trajectory, result.objective, result.signal, alpha, beta,
                                  eps, xstar);
        } else if (req.name == "lambda") {
            er.trace = energy_lambda(result.trajectory, result.objective, result.signal, alpha,
                                     beta, req.lambda, xstar);
        } else if (req.name == "sc") {
            const ScVariant variant = cfg.system.kind == SystemKind::HbExplicit
                                          ? ScVariant::Explicit
                                          : ScVariant::Implicit;
            er.trace = energy_sc(result.trajectory, result.objective, result.signal, beta, variant);
            result.sc_bound =
                sc_bound_check(er.trace, result.objective, result.signal, beta, variant);
            if (!result.sc_bound->ok)
                result.certification_failures.push_back("sc bound check failed, min slack " +
                                                        fmt(result.sc_bound->min_slack));
        } else if (req.name == "implicit-convex") {
            const double b = req.b > 0.0 ? req.b : 0.5 * (alpha + 1.0);
            ImplicitCoefficients coeffs =
                implicit_coefficients(alpha, b, cfg.system.gamma, beta);
            ConditionReport cr = check_conditions(coeffs, result.trajectory.times);
            er.trace = energy_implicit_convex(result.trajectory, result.objective, result.signal,
                                              coeffs, cr.t1, xstar);
        } else {
            throw std::invalid_argument("config: unknown energy '" + req.name + "'");
        }
        er.trace.violations = check_monotone(er.trace, er.rel_tol);
        er.certified = er.trace.violations.empty();
        if (!er.certified)
            result.certification_failures.push_back(
                "energy " + req.name + ": " + std::to_string(er.trace.violations.size()) +
                " monotonicity violations past t1 = " + fmt(er.trace.t1));
        result.energies[req.name] = std::move(er);
    }

    // artifacts
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/trajectory.csv", csv_trajectory(result, extrap_gap));
        for (const auto& [name, er] : result.energies)
            write_file(out_dir + "/energy_" + name + ".csv", csv_energy(er.trace));

        std::string report = "name,objective,system,perturbation,delta,fbar,slope,intercept,"
                             "residual_rms,classification,slope_extrap,hypothesis,violations_total,"
                             "sc_min_slack";
        for (const auto& [name, er] : result.energies)
            report += ",energy_" + name + "_t1,energy_" + name + "_violations";
        report += "\n";
        std::size_t viol_total = 0;
        for (const auto& [name, er] : result.energies) viol_total += er.trace.violations.size();
        report += cfg.name + "," + cfg.objective_id + "," + to_string(cfg.system.kind) + "," +
                  cfg.perturbation_kind + "," +
                  (cfg.perturbation_kind == "cosine-decay" ? fmt(cfg.perturbation_delta) : "") +
                  "," + fmt(result.fbar) + "," + fmt(result.rate.slope) + "," +
                  fmt(result.rate.intercept) + "," + fmt(result.rate.residual_rms) + "," +
                  to_string(result.rate.classification) + "," +
                  (result.rate_extrap ? fmt(result.rate_extrap->slope) : "") + "," +
                  result.hypothesis_note + "," + std::to_string(viol_total) + "," +
                  (result.sc_bound ? fmt(result.sc_bound->min_slack) : "");
        for (const auto& [name, er] : result.energies)
            report += "," + fmt(er.trace.t1) + "," + std::to_string(er.trace.violations.size());
        report += "\n";
        write_file(out_dir + "/report.csv", report);
        write_file(out_dir + "/plot.gp", plot_script(result));
    }
    return result;
}

std::vector<ScenarioConfig> section6_grid() {
    std::vector<ScenarioConfig> grid;
    const std::vector<double> deltas = {0.1, 1.1, 3.1};
    for (bool smooth : {true, false}) {
        for (bool explicit_kind : {true, false}) {
            for (double delta : deltas) {
                ScenarioConfig cfg;
                cfg.perturbation_kind = "cosine-decay";
                cfg.perturbation_delta = delta;
                cfg.system.alpha = 3.1;
                cfg.system.t0 = 1.0;
                cfg.horizon = 50.0;
                cfg.certify = false;
                if (smooth) {
                    cfg.objective_id = "quartic";
                    cfg.integrator_kind = "rk45";
                    if (explicit_kind) {
                        cfg.system.kind = SystemKind::Isehd;
                        cfg.system.beta = 1.0;
                        cfg.system.gamma = 0.0;
                        cfg.energies = {{"W"}, {"fast"}, {"eps", 0.05}};
                    } else {
                        cfg.system.kind = SystemKind::Isihd;
                        cfg.system.beta = 1.0;
                        cfg.system.gamma = 1.0;
                        cfg.energies = {{"implicit-convex"}};
                    }
                } else {
                    cfg.objective_id = "quartic-l1";
                    cfg.integrator_kind = "prox";
                    cfg.prox_h = 1e-3;
                    if (explicit_kind) {
                        cfg.system.kind = SystemKind::IsehdInclusion;
                        cfg.system.beta = 1.0;
                        cfg.system.gamma = 0.0;
                        EnergyRequest lam;
                        lam.name = "lambda";
                        lam.lambda = 2.0;
                        cfg.energies = {{"W"}, lam};
                    } else {
                        // no certified Lyapunov function exists for this system;
                        // simulation only
                        cfg.system.kind = SystemKind::IsihdInclusion;
                        cfg.system.beta = 0.0;
                        cfg.system.gamma = 1.0;
                    }
                }
                cfg.name = std::string(smooth ? "smooth-" : "nonsmooth-") +
                           (explicit_kind ? "explicit" : "implicit") + "-delta" + fmt(delta);
                grid.push_back(std::move(cfg));
            }
        }
    }
    return grid;
}

std::map<std::string, RunResult> reproduce_section6(const std::string& out_dir) {
    std::map<std::string, RunResult> results;
    std::string summary =
        "name,objective,system,delta,slope_fgap,classification,slope_extrap,slope_dist,"
        "hypothesis,violations_total,fbar\n";
    for (const ScenarioConfig& cfg : section6_grid()) {
        RunResult r = run_scenario(cfg, out_dir.empty() ? "" : out_dir + "/" + cfg.name);
        std::vector<double> dist(r.trajectory.size());
        for (std::size_t i = 0; i < r.trajectory.size(); ++i)
            dist[i] = norm(sub(r.trajectory.x[i], r.xstar));
        RateReport dist_rate =
            fit_rate_resampled(r.trajectory.times, dist, cfg.horizon / 5.0, cfg.horizon);
        std::size_t viol = 0;
        for (const auto& [name, er] : r.energies) viol += er.trace.violations.size();
        summary += cfg.name + "," + cfg.objective_id + "," + to_string(cfg.system.kind) + "," +
                   fmt(cfg.perturbation_delta) + "," + fmt(r.rate.slope) + "," +
                   to_string(r.rate.classification) + "," +
                   (r.rate_extrap ? fmt(r.rate_extrap->slope) : "") + "," +
                   fmt(dist_rate.slope) + "," + r.hypothesis_note + "," + std::to_string(viol) +
                   "," + fmt(r.fbar) + "\n";
        results.emplace(cfg.name, std::move(r));
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_file(out_dir + "/summary.csv", summary);
    }
    return results;
}

}  // namespace idyn
