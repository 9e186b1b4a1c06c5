#include "idyn/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idyn {

namespace {

double require_fbar(const Objective& obj) {
    if (!obj.known_min_value)
        throw std::invalid_argument("energy: objective has no known minimum value (fbar unknown)");
    return *obj.known_min_value;
}

// int_t^T integrand, trapezoid backward from the horizon; zero at the last sample
std::vector<double> backward_trapezoid(const std::vector<double>& times,
                                       const std::vector<double>& integrand) {
    std::vector<double> tail(times.size(), 0.0);
    for (std::size_t i = times.size() - 1; i-- > 0;)
        tail[i] = tail[i + 1] +
                  0.5 * (integrand[i] + integrand[i + 1]) * (times[i + 1] - times[i]);
    return tail;
}

// velocity of the trajectory sample: stored for second-order runs, recovered
// from the first-order algebra otherwise
Vec sample_velocity(const Trajectory& traj, std::size_t i, const SystemSpec& spec,
                    const Objective& obj, const PerturbationSignal& signal) {
    if (traj.companion_kind == CompanionKind::Velocity) return traj.companion[i];
    const double t = traj.times[i];
    if (spec.kind == SystemKind::Isihd || spec.kind == SystemKind::IsihdInclusion) {
        const double bt = spec.kind == SystemKind::Isihd ? beta_schedule(spec, t).first
                                                         : spec.gamma;
        Vec v = sub(traj.companion[i], traj.x[i]);
        for (double& c : v) c /= bt;
        return v;
    }
    // explicit family: xdot = udot - beta*xi with udot from the y-equation
    Vec udot = scaled(traj.x[i], 1.0 / spec.beta - spec.alpha / t);
    axpy(udot, -1.0 / spec.beta, traj.companion[i]);
    if (!signal.is_zero()) axpy(udot, -spec.beta, signal.eval(t));
    Vec xi = traj.xi.empty() ? gradient(obj, traj.x[i]) : traj.xi[i];
    axpy(udot, -spec.beta, xi);
    return udot;
}

// udot = xdot + beta*xi for the explicit family, in the form valid for both
// smooth (xi = grad f) and inclusion (xi recovered / algebraic) trajectories
Vec sample_udot(const Trajectory& traj, std::size_t i, const Objective& obj,
                const PerturbationSignal& signal, double alpha, double beta) {
    if (traj.companion_kind == CompanionKind::Velocity) {
        Vec udot = traj.companion[i];
        axpy(udot, beta, traj.xi.empty() ? gradient(obj, traj.x[i]) : traj.xi[i]);
        return udot;
    }
    const double t = traj.times[i];
    Vec udot = scaled(traj.x[i], 1.0 / beta - alpha / t);
    axpy(udot, -1.0 / beta, traj.companion[i]);
    if (!signal.is_zero()) axpy(udot, -beta, signal.eval(t));
    return udot;
}

EnergyTrace finish(std::vector<double> times, std::vector<double> base,
                   const std::vector<double>& tail_integrand, double t1) {
    EnergyTrace trace;
    trace.times = std::move(times);
    trace.tail_integrals = backward_trapezoid(trace.times, tail_integrand);
    trace.values = std::move(base);
    for (std::size_t i = 0; i < trace.values.size(); ++i) trace.values[i] -= trace.tail_integrals[i];
    trace.t1 = t1;
    return trace;
}

}  // namespace

EnergyTrace energy_W(const Trajectory& traj, const Objective& obj,
                     const PerturbationSignal& signal, double alpha, double beta) {
    const double fbar = require_fbar(obj);
    const std::size_t n = traj.size();
    std::vector<double> base(n), integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec udot = sample_udot(traj, i, obj, signal, alpha, beta);
        base[i] = 0.5 * dot(udot, udot) + value(obj, traj.x[i]) - fbar;
        integrand[i] = signal.is_zero()
                           ? 0.0
                           : dot(udot, combine_g(signal, beta, traj.times[i]));
    }
    const double t1 = std::max(traj.times.front(), 2.0 * alpha * beta);
    return finish(traj.times, std::move(base), integrand, t1);
}

namespace {

EnergyTrace fast_family(const Trajectory& traj, const Objective& obj,
                        const PerturbationSignal& signal, double alpha, double beta, double eps,
                        const Vec& xstar) {
    const double fstar = value(obj, xstar);
    // paper hypothesis; the epsilon variant keeps the same constraint on alpha
    if (!(alpha > 3.0))
        throw std::invalid_argument("energy_fast: hypothesis violated, requires alpha > 3");
    SystemSpec dummy{SystemKind::Isehd, alpha, beta, 0.0, traj.times.front()};

    const std::size_t n = traj.size();
    std::vector<double> base(n), integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.times[i];
        const double w = 1.0 - beta / t;
        const double delta = t * t * w;
        Vec xdot = sample_velocity(traj, i, dummy, obj, signal);
        Vec v = scaled(sub(traj.x[i], xstar), alpha - 1.0 - eps);
        Vec inner = xdot;
        axpy(inner, beta, gradient(obj, traj.x[i]));
        axpy(v, t, inner);
        const double fgap = value(obj, traj.x[i]) - fstar;
        base[i] = (delta + eps * beta * t) * fgap + 0.5 * dot(v, v);
        if (eps > 0.0) {
            Vec dx = sub(traj.x[i], xstar);
            base[i] += 0.5 * eps * (alpha - 1.0 - eps) * dot(dx, dx);
        }
        integrand[i] = signal.is_zero() ? 0.0 : t * dot(v, combine_g(signal, beta, t));
    }
    const double t1 =
        std::max(traj.times.front(), beta * (alpha - 2.0 - eps) / (alpha - 3.0 - eps));
    return finish(traj.times, std::move(base), integrand, t1);
}

}  // namespace

EnergyTrace energy_fast(const Trajectory& traj, const Objective& obj,
                        const PerturbationSignal& signal, double alpha, double beta,
                        const Vec& xstar) {
    return fast_family(traj, obj, signal, alpha, beta, 0.0, xstar);
}

EnergyTrace energy_eps(const Trajectory& traj, const Objective& obj,
                       const PerturbationSignal& signal, double alpha, double beta, double eps,
                       const Vec& xstar) {
    if (!(eps > 0.0 && eps < alpha - 3.0))
        throw std::invalid_argument("energy_eps: eps must lie in ]0, alpha-3[");
    return fast_family(traj, obj, signal, alpha, beta, eps, xstar);
}

EnergyTrace energy_lambda(const Trajectory& traj, const Objective& obj,
                          const PerturbationSignal& signal, double alpha, double beta,
                          double lambda, const Vec& xstar) {
    if (!(alpha >= 3.0)) throw std::invalid_argument("energy_lambda: requires alpha >= 3");
    if (!(lambda >= 2.0 && lambda <= alpha - 1.0))
        throw std::invalid_argument("energy_lambda: lambda must lie in [2, alpha-1]");
    const double fbar = require_fbar(obj);

    const std::size_t n = traj.size();
    std::vector<double> base(n), integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.times[i];
        Vec udot = sample_udot(traj, i, obj, signal, alpha, beta);
        Vec v = scaled(sub(traj.x[i], xstar), lambda);
        axpy(v, t, udot);
        const double fgap = value(obj, traj.x[i]) - fbar;
        Vec dx = sub(traj.x[i], xstar);
        base[i] = t * (t - beta * (lambda + 2.0 - alpha)) * fgap + 0.5 * dot(v, v) +
                  0.5 * lambda * (alpha - lambda - 1.0) * dot(dx, dx);
        integrand[i] = signal.is_zero() ? 0.0 : t * dot(v, combine_g(signal, beta, t));
    }
    const double t1 = std::max(traj.times.front(), beta);
    return finish(traj.times, std::move(base), integrand, t1);
}

EnergyTrace energy_sc(const Trajectory& traj, const Objective& obj,
                      const PerturbationSignal& signal, double beta, ScVariant variant) {
    if (!(obj.mu > 0.0)) throw std::invalid_argument("energy_sc: requires mu > 0");
    if (!obj.known_minimizer) throw std::invalid_argument("energy_sc: minimizer unknown");
    if (traj.companion_kind != CompanionKind::Velocity)
        throw std::invalid_argument("energy_sc: expects a velocity-carrying trajectory");
    const double fbar = require_fbar(obj);
    const Vec& xstar = *obj.known_minimizer;
    const double root_mu = std::sqrt(obj.mu);
    SystemSpec dummy{variant == ScVariant::Explicit ? SystemKind::HbExplicit
                                                    : SystemKind::HbImplicit,
                     0.0, beta, 0.0, traj.times.front()};

    EnergyTrace trace;
    trace.times = traj.times;
    trace.t1 = traj.times.front();
    trace.tail_integrals.assign(traj.size(), 0.0);
    trace.values.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        Vec xdot = sample_velocity(traj, i, dummy, obj, signal);
        Vec v = scaled(sub(traj.x[i], xstar), root_mu);
        axpy(v, 1.0, xdot);
        if (variant == ScVariant::Explicit) {
            axpy(v, beta, gradient(obj, traj.x[i]));
            trace.values[i] = value(obj, traj.x[i]) - fbar + 0.5 * dot(v, v);
        } else {
            Vec shifted = traj.x[i];
            axpy(shifted, beta, xdot);
            trace.values[i] = value(obj, shifted) - fbar + 0.5 * dot(v, v);
        }
    }
    return trace;
}

double ImplicitCoefficients::a(double t) const {
    const double numer = t * t - b * gamma * t - b * beta;
    const double denom = t * t - alpha * gamma * t - beta * (alpha + 1.0);
    return t * t * numer / denom;
}

double ImplicitCoefficients::a_dot(double t) const {
    const double n = t * t - b * gamma * t - b * beta;
    const double dn = 2.0 * t - b * gamma;
    const double m = t * t - alpha * gamma * t - beta * (alpha + 1.0);
    const double dm = 2.0 * t - alpha * gamma;
    return (2.0 * t * n + t * t * dn) / m - t * t * n * dm / (m * m);
}

ImplicitCoefficients implicit_coefficients(double alpha, double b, double gamma, double beta) {
    if (!(alpha >= 3.0))
        throw std::invalid_argument("implicit_coefficients: requires alpha >= 3");
    if (!(b >= 2.0 - 1e-12 && b <= alpha - 1.0 + 1e-12))
        throw std::invalid_argument("implicit_coefficients: b must lie in [2, alpha-1]");
    ImplicitCoefficients c;
    c.alpha = alpha;
    c.gamma = gamma;
    c.beta = beta;
    c.b = b;
    c.d = b * (alpha - 1.0 - b);
    const double disc_den = alpha * alpha * gamma * gamma + 4.0 * beta * (alpha + 1.0);
    const double disc_num = b * b * gamma * gamma + 4.0 * b * beta;
    c.pole_upper = std::max(0.5 * (alpha * gamma + std::sqrt(disc_den)),
                            0.5 * (b * gamma + std::sqrt(disc_num)));
    return c;
}

ConditionReport check_conditions(const ImplicitCoefficients& c, const std::vector<double>& grid) {
    ConditionReport report;
    report.first_hold_time.assign(6, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::array<bool, 6>> holds(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const bool pole_free = t > c.pole_upper;
        if (!pole_free) {
            holds[i].fill(false);
            continue;
        }
        const double a = c.a(t), adot = c.a_dot(t);
        const double bt = c.beta_t(t), btdot = c.beta_dot(t);
        const double alpha_t = c.alpha / t;
        const double eq3 = -a * alpha_t * bt + a * btdot + a - t * t + c.b * t * bt;
        const double eq5 = c.b * (c.b + 1.0 - alpha_t * t) + c.d;
        report.max_equality_residual = std::max(report.max_equality_residual, std::abs(eq3));

        holds[i][0] = adot - c.b * t <= 1e-9;
        holds[i][1] = -a * bt <= 0.0;
        holds[i][2] = std::abs(eq3) <= 1e-9;
        holds[i][3] = true;  // b, d constant: b*bdot + ddot/2 == 0
        holds[i][4] = std::abs(eq5) <= 1e-9;
        holds[i][5] = t * (c.b + 1.0 - c.alpha) <= 1e-12;
    }

    // t1 = earliest grid point from which every later point satisfies all six
    std::size_t from = grid.size();
    for (std::size_t i = grid.size(); i-- > 0;) {
        bool all = true;
        for (bool h : holds[i]) all = all && h;
        if (!all) break;
        from = i;
    }
    if (from == grid.size())
        throw std::runtime_error("check_conditions: conditions never all hold on the grid");
    report.t1 = grid[from];
    report.found = true;
    for (int k = 0; k < 6; ++k) {
        std::size_t fk = grid.size();
        for (std::size_t i = grid.size(); i-- > 0;) {
            if (!holds[i][k]) break;
            fk = i;
        }
        if (fk < grid.size()) report.first_hold_time[k] = grid[fk];
    }
    return report;
}

EnergyTrace energy_implicit_convex(const Trajectory& traj, const Objective& obj,
                                   const PerturbationSignal& signal,
                                   const ImplicitCoefficients& coeffs, double t1,
                                   const Vec& xstar) {
    const double fbar = require_fbar(obj);
    SystemSpec dummy{SystemKind::Isihd, coeffs.alpha, coeffs.beta, coeffs.gamma,
                     traj.times.front()};

    const std::size_t n = traj.size();
    std::vector<double> base(n), integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.times[i];
        const double a = coeffs.a(t);
        const double bt = coeffs.beta_t(t);
        Vec xdot = sample_velocity(traj, i, dummy, obj, signal);
        Vec shifted = traj.x[i];
        axpy(shifted, bt, xdot);
        Vec vb = scaled(sub(traj.x[i], xstar), coeffs.b);
        axpy(vb, t, xdot);
        Vec dx = sub(traj.x[i], xstar);
        base[i] = a * (value(obj, shifted) - fbar) + 0.5 * dot(vb, vb) +
                  0.5 * coeffs.d * dot(dx, dx);
        if (!signal.is_zero()) {
            const Vec e = signal.eval(t);
            integrand[i] = t * dot(vb, e) + a * bt * dot(gradient(obj, shifted), e);
        }
    }
    EnergyTrace trace = finish(traj.times, std::move(base), integrand, t1);
    return trace;
}

std::vector<std::pair<std::size_t, double>> check_monotone(const EnergyTrace& trace,
                                                           double rel_tol) {
    std::vector<std::pair<std::size_t, double>> violations;
    if (trace.values.empty()) return violations;
    std::size_t i1 = 0;
    while (i1 < trace.times.size() && trace.times[i1] < trace.t1) ++i1;
    if (i1 >= trace.values.size()) return violations;
    const double scale = std::max(std::abs(trace.values[i1]), 1e-30);
    for (std::size_t i = i1; i + 1 < trace.values.size(); ++i) {
        const double inc = trace.values[i + 1] - trace.values[i];
        if (inc > rel_tol * scale) violations.emplace_back(i, inc);
    }
    return violations;
}

}  // namespace idyn
