#include "idyn/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace idyn {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("integrator: tolerances must be positive");
    if (!(0.0 < h_min && h_min <= h_init && h_init <= h_max))
        throw std::invalid_argument("integrator: need 0 < h_min <= h_init <= h_max");
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - bhat, error weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct DenseSegment {
    double t = 0.0, h = 0.0;
    Vec r1, r2, r3, r4, r5;

    Vec eval(double tq) const {
        const double th = (tq - t) / h;
        const double th1 = 1.0 - th;
        Vec out(r1.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return out;
    }
};

}  // namespace

OdeSolution integrate_rk(const RhsFn& rhs, double t0, double T, Vec y, const IntegratorConfig& cfg) {
    cfg.validate();
    if (!(T > t0)) throw std::invalid_argument("integrate_rk: T must exceed t0");
    const std::size_t n = y.size();

    OdeSolution out;
    std::vector<double> wanted = cfg.output_times;
    std::size_t next_out = 0;
    const bool adaptive_output = wanted.empty();

    auto emit = [&](double t, Vec state) {
        out.times.push_back(t);
        out.states.push_back(std::move(state));
    };
    if (adaptive_output) {
        emit(t0, y);
    } else {
        while (next_out < wanted.size() && wanted[next_out] <= t0 + 1e-14 * std::max(1.0, t0))
            emit(wanted[next_out++], y);
    }

    Vec k1 = rhs(t0, y), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);
    out.rhs_evaluations = 1;

    double t = t0;
    double h = std::min(cfg.h_init, T - t0);
    double facold = 1e-4;
    const double safe = 0.9, beta_pi = 0.04;
    const double expo1 = 0.2 - beta_pi * 0.75;

    while (t < T) {
        if (h < cfg.h_min)
            throw std::runtime_error("integrate_rk: step underflow near t = " + std::to_string(t));
        h = std::min(h, T - t);

        auto stage = [&](double frac, auto&&... terms) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                ((acc += terms.first * terms.second[i]), ...);
                ytmp[i] = y[i] + h * acc;
            }
            return t + frac * h;
        };
        using P = std::pair<double, const Vec&>;
        k2 = rhs(stage(c2, P{a21, k1}), ytmp);
        k3 = rhs(stage(c3, P{a31, k1}, P{a32, k2}), ytmp);
        k4 = rhs(stage(c4, P{a41, k1}, P{a42, k2}, P{a43, k3}), ytmp);
        k5 = rhs(stage(c5, P{a51, k1}, P{a52, k2}, P{a53, k3}, P{a54, k4}), ytmp);
        k6 = rhs(stage(1.0, P{a61, k1}, P{a62, k2}, P{a63, k3}, P{a64, k4}, P{a65, k5}), ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(t + h, ynew);
        out.rhs_evaluations += 6;

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sc) * (yerr[i] / sc);
        }
        err = std::sqrt(err / n);
        if (!std::isfinite(err) || !all_finite(ynew)) {
            // treat as a rejected step; shrinking h may recover from overflow
            err = std::max(err, 1e10);
            if (!std::isfinite(err)) err = 1e10;
        }

        const double fac11 = std::pow(std::max(err, 1e-32), expo1);
        if (err <= 1.0) {
            // accepted
            DenseSegment seg;
            seg.t = t;
            seg.h = h;
            seg.r1 = y;
            seg.r2.resize(n);
            seg.r3.resize(n);
            seg.r4.resize(n);
            seg.r5.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                seg.r2[i] = ydiff;
                seg.r3[i] = bspl;
                seg.r4[i] = ydiff - h * k7[i] - bspl;
                seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                 d7 * k7[i]);
            }

            const double t_new = t + h;
            if (adaptive_output) {
                emit(t_new, ynew);
            } else {
                while (next_out < wanted.size() &&
                       wanted[next_out] <= t_new + 1e-14 * std::max(1.0, t_new)) {
                    emit(wanted[next_out], seg.eval(std::min(wanted[next_out], t_new)));
                    ++next_out;
                }
            }

            double fac = fac11 / std::pow(facold, beta_pi);
            fac = std::max(0.1, std::min(10.0, safe / fac));
            facold = std::max(err, 1e-4);
            y = ynew;
            k1 = k7;  // FSAL
            t = t_new;
            ++out.accepted_steps;
            h = std::min(h * fac, cfg.h_max);
        } else {
            ++out.rejected_steps;
            h = h * std::max(0.1, safe / fac11);
        }
    }
    return out;
}

Trajectory integrate_prox_explicit(const SystemSpec& spec, const Objective& obj,
                                   const PerturbationSignal& signal, double t0, double T,
                                   const Vec& x0, const Vec& y0, double h,
                                   const std::vector<double>& output_times) {
    if (!(spec.beta > 0.0)) throw std::invalid_argument("prox explicit: beta must be positive");
    if (!(h > 0.0)) throw std::invalid_argument("prox explicit: h must be positive");
    check_dimension(x0, obj.dimension, "integrate_prox_explicit");
    check_dimension(y0, obj.dimension, "integrate_prox_explicit");

    const double b = spec.beta;
    const long steps = std::lround((T - t0) / h);

    Trajectory traj;
    traj.companion_kind = CompanionKind::Auxiliary;
    // snap requested output times to the step grid; empty request = every step
    std::vector<long> keep;
    if (output_times.empty()) {
        keep.resize(steps + 1);
        for (long k = 0; k <= steps; ++k) keep[k] = k;
    } else {
        keep.reserve(output_times.size());
        for (double tq : output_times)
            keep.push_back(std::clamp(std::lround((tq - t0) / h), 0L, steps));
    }
    std::size_t next_keep = 0;

    Vec x = x0, y = y0;
    Vec xi = subgradient(obj, x0);
    for (long k = 0; k <= steps; ++k) {
        const double t = t0 + k * h;
        while (next_keep < keep.size() && keep[next_keep] == k) {
            traj.times.push_back(t);
            traj.x.push_back(x);
            traj.companion.push_back(y);
            traj.xi.push_back(xi);
            ++next_keep;
        }
        if (k == steps) break;

        Vec drift = scaled(x, 1.0 / b - spec.alpha / t);
        axpy(drift, -1.0 / b, y);
        if (!signal.is_zero()) axpy(drift, -b, signal.eval(t));
        Vec v = x;
        axpy(v, h, drift);
        Vec x_next = prox(obj, v, b * h);
        // prox optimality recovers xi in the subdifferential at x_{k+1}
        xi = sub(v, x_next);
        for (double& c : xi) c /= b * h;

        Vec y_next = y;
        axpy(y_next, h * (1.0 / b - spec.alpha / t + spec.alpha * b / (t * t)), x);
        axpy(y_next, -h / b, y);

        x = std::move(x_next);
        y = std::move(y_next);
    }
    return traj;
}

Trajectory integrate_prox_implicit(const SystemSpec& spec, const Objective& obj,
                                   const PerturbationSignal& signal, double t0, double T,
                                   const Vec& x0, const Vec& y0, double h,
                                   const std::vector<double>& output_times) {
    if (!(spec.gamma > 0.0))
        throw std::invalid_argument("prox implicit: requires constant beta(t) == gamma > 0");
    if (spec.beta != 0.0)
        throw std::invalid_argument(
            "prox implicit: time-varying beta(t) rejected; reduce via time_rescale");
    if (!(h > 0.0)) throw std::invalid_argument("prox implicit: h must be positive");
    check_dimension(x0, obj.dimension, "integrate_prox_implicit");
    check_dimension(y0, obj.dimension, "integrate_prox_implicit");

    const double g = spec.gamma;
    const long steps = std::lround((T - t0) / h);

    Trajectory traj;
    traj.companion_kind = CompanionKind::Auxiliary;
    std::vector<long> keep;
    if (output_times.empty()) {
        keep.resize(steps + 1);
        for (long k = 0; k <= steps; ++k) keep[k] = k;
    } else {
        keep.reserve(output_times.size());
        for (double tq : output_times)
            keep.push_back(std::clamp(std::lround((tq - t0) / h), 0L, steps));
    }
    std::size_t next_keep = 0;

    Vec x = x0, y = y0;
    Vec xi = subgradient(obj, y0);
    for (long k = 0; k <= steps; ++k) {
        const double t = t0 + k * h;
        while (next_keep < keep.size() && keep[next_keep] == k) {
            traj.times.push_back(t);
            traj.x.push_back(x);
            traj.companion.push_back(y);
            traj.xi.push_back(xi);
            ++next_keep;
        }
        if (k == steps) break;

        Vec w = y;
        axpy(w, -(h / g) * (1.0 - spec.alpha * g / t), sub(x, y));
        if (!signal.is_zero()) axpy(w, -h * g, signal.eval(t));
        Vec y_next = prox(obj, w, g * h);
        xi = sub(w, y_next);
        for (double& c : xi) c /= g * h;

        Vec x_next = x;
        axpy(x_next, h / g, sub(y, x));

        x = std::move(x_next);
        y = std::move(y_next);
    }
    return traj;
}

TimeRescale time_rescale(const std::function<double(double)>& beta_fn, double t0, double horizon) {
    // beta must stay positive on the working horizon
    const int probes = 2048;
    for (int i = 0; i <= probes; ++i) {
        const double t = t0 + (horizon - t0) * i / probes;
        if (!(beta_fn(t) > 0.0))
            throw std::invalid_argument("time_rescale: beta(t) must be positive on the horizon");
    }
    auto primitive = [beta_fn, t0](double t) {
        if (t <= t0) return 0.0;
        return adaptive_simpson(beta_fn, t0, t, 1e-12);
    };
    auto tau = [primitive, beta_fn, t0, horizon](double s) {
        if (s < 0.0) throw std::invalid_argument("time_rescale: s must be >= 0");
        if (s == 0.0) return t0;
        // monotone root-find of p(tau) = s, Newton with bisection safeguard
        double lo = t0, hi = t0 + 1.0;
        while (primitive(hi) < s) {
            lo = hi;
            hi = t0 + 2.0 * (hi - t0);
            if (hi > 64.0 * horizon) throw std::runtime_error("time_rescale: s beyond horizon");
        }
        double u = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double r = primitive(u) - s;
            if (std::abs(r) <= 1e-10) return u;
            if (r > 0.0)
                hi = u;
            else
                lo = u;
            double step = u - r / beta_fn(u);
            if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
            u = step;
        }
        return u;
    };
    return TimeRescale{t0, primitive, tau};
}

Trajectory integrate_system(const SystemSpec& spec, const Objective& obj,
                            const PerturbationSignal& signal, double T, const Vec& x0,
                            const Vec& v0, const IntegratorConfig& cfg, bool first_order) {
    if (spec.is_inclusion())
        throw std::invalid_argument("integrate_system: use the prox schemes for inclusions");
    // the explicit second-order form needs Hessian-vector products; fall back
    // to the first-order reformulation when they are unavailable
    const bool needs_hessian =
        spec.kind == SystemKind::Isehd || spec.kind == SystemKind::HbExplicit;
    if (needs_hessian && !obj.has_hessian()) first_order = true;

    Trajectory traj;
    const int n = obj.dimension;
    if (first_order) {
        auto [xi0, yi0] = lift_initial(spec, obj, signal, x0, v0);
        Vec init(2 * n);
        std::copy(xi0.begin(), xi0.end(), init.begin());
        std::copy(yi0.begin(), yi0.end(), init.begin() + n);
        auto rhs = [&](double t, const Vec& s) {
            Vec x(s.begin(), s.begin() + n), y(s.begin() + n, s.end());
            auto [dx, dy] = first_order_rhs(spec, obj, signal, t, x, y);
            Vec d(2 * n);
            std::copy(dx.begin(), dx.end(), d.begin());
            std::copy(dy.begin(), dy.end(), d.begin() + n);
            return d;
        };
        OdeSolution sol = integrate_rk(rhs, spec.t0, T, init, cfg);
        traj.companion_kind = CompanionKind::Auxiliary;
        traj.times = std::move(sol.times);
        for (const Vec& s : sol.states) {
            traj.x.emplace_back(s.begin(), s.begin() + n);
            traj.companion.emplace_back(s.begin() + n, s.end());
        }
    } else {
        Vec init(2 * n);
        std::copy(x0.begin(), x0.end(), init.begin());
        std::copy(v0.begin(), v0.end(), init.begin() + n);
        auto rhs = [&](double t, const Vec& s) {
            Vec x(s.begin(), s.begin() + n), v(s.begin() + n, s.end());
            auto [dx, dv] = second_order_rhs(spec, obj, signal, t, x, v);
            Vec d(2 * n);
            std::copy(dx.begin(), dx.end(), d.begin());
            std::copy(dv.begin(), dv.end(), d.begin() + n);
            return d;
        };
        OdeSolution sol = integrate_rk(rhs, spec.t0, T, init, cfg);
        traj.companion_kind = CompanionKind::Velocity;
        traj.times = std::move(sol.times);
        for (const Vec& s : sol.states) {
            traj.x.emplace_back(s.begin(), s.begin() + n);
            traj.companion.emplace_back(s.begin() + n, s.end());
        }
    }
    return traj;
}

void finalize_trajectory(Trajectory& traj, const Objective& obj, double fbar) {
    traj.f_gap.resize(traj.size());
    traj.grad_norm.resize(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        traj.f_gap[i] = value(obj, traj.x[i]) - fbar;
        traj.grad_norm[i] =
            traj.xi.empty() ? norm(gradient(obj, traj.x[i])) : norm(traj.xi[i]);
    }
}

}  // namespace idyn
