#include "idyn/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace idyn {

const char* to_string(SystemKind k) {
    switch (k) {
        case SystemKind::Isehd: return "isehd";
        case SystemKind::Isihd: return "isihd";
        case SystemKind::HbExplicit: return "hb-explicit";
        case SystemKind::HbImplicit: return "hb-implicit";
        case SystemKind::IsehdInclusion: return "isehd-inclusion";
        case SystemKind::IsihdInclusion: return "isihd-inclusion";
    }
    return "?";
}

SystemKind system_kind_from_string(const std::string& s) {
    if (s == "isehd") return SystemKind::Isehd;
    if (s == "isihd") return SystemKind::Isihd;
    if (s == "hb-explicit") return SystemKind::HbExplicit;
    if (s == "hb-implicit") return SystemKind::HbImplicit;
    if (s == "isehd-inclusion") return SystemKind::IsehdInclusion;
    if (s == "isihd-inclusion") return SystemKind::IsihdInclusion;
    throw std::invalid_argument("unknown system kind: " + s);
}

std::vector<std::string> validate(const SystemSpec& spec, const Objective& obj) {
    std::vector<std::string> warnings;
    if (!(spec.t0 > 0.0)) throw std::invalid_argument("system: t0 must be positive");
    if (spec.alpha < 0.0) throw std::invalid_argument("system: alpha must be >= 0");
    if (spec.beta < 0.0 || spec.gamma < 0.0)
        throw std::invalid_argument("system: beta and gamma must be >= 0");

    switch (spec.kind) {
        case SystemKind::Isehd:
        case SystemKind::IsehdInclusion:
            if (!(spec.beta > 0.0))
                throw std::invalid_argument(
                    "system: the explicit first-order form divides by beta; beta > 0 required");
            break;
        case SystemKind::Isihd:
            if (!(spec.gamma > 0.0) && !(spec.beta > 0.0))
                throw std::invalid_argument("system: isihd requires inf beta(t) > 0");
            break;
        case SystemKind::IsihdInclusion:
            if (!(spec.gamma > 0.0))
                throw std::invalid_argument(
                    "system: the implicit inclusion scheme requires constant beta(t) == gamma > 0");
            if (spec.beta != 0.0)
                throw std::invalid_argument(
                    "system: time-varying beta(t) is rejected for the implicit inclusion; "
                    "use time_rescale to reduce to the constant case");
            break;
        case SystemKind::HbExplicit:
        case SystemKind::HbImplicit: {
            if (!(obj.mu > 0.0))
                throw std::invalid_argument("system: heavy-ball variants require mu > 0");
            const double bmax = 1.0 / (2.0 * std::sqrt(obj.mu));
            if (spec.beta > bmax)
                warnings.push_back("beta exceeds 1/(2*sqrt(mu)) = " + std::to_string(bmax) +
                                   "; exponential decay is not guaranteed in this regime");
            break;
        }
    }
    return warnings;
}

std::pair<double, double> beta_schedule(const SystemSpec& spec, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("beta_schedule: t must be positive");
    return {spec.gamma + spec.beta / t, -spec.beta / (t * t)};
}

std::pair<Vec, Vec> second_order_rhs(const SystemSpec& spec, const Objective& obj,
                                     const PerturbationSignal& signal, double t, const Vec& x,
                                     const Vec& v) {
    check_dimension(x, obj.dimension, "second_order_rhs");
    check_dimension(v, obj.dimension, "second_order_rhs");
    if (t < spec.t0) throw std::invalid_argument("second_order_rhs: t < t0");

    Vec dv(obj.dimension, 0.0);
    switch (spec.kind) {
        case SystemKind::Isehd: {
            // dv = -(alpha/t) v - beta*(H(x)v + edot) - grad f(x) - e
            dv = scaled(v, -spec.alpha / t);
            axpy(dv, -spec.beta, hessian_vector(obj, x, v));
            axpy(dv, -spec.beta, signal.eval_derivative(t));
            axpy(dv, -1.0, gradient(obj, x));
            axpy(dv, -1.0, signal.eval(t));
            break;
        }
        case SystemKind::Isihd: {
            const double bt = beta_schedule(spec, t).first;
            Vec shifted = x;
            axpy(shifted, bt, v);
            dv = scaled(v, -spec.alpha / t);
            axpy(dv, -1.0, gradient(obj, shifted));
            axpy(dv, -1.0, signal.eval(t));
            break;
        }
        case SystemKind::HbExplicit: {
            const double damp = 2.0 * std::sqrt(obj.mu);
            dv = scaled(v, -damp);
            axpy(dv, -spec.beta, hessian_vector(obj, x, v));
            axpy(dv, -spec.beta, signal.eval_derivative(t));
            axpy(dv, -1.0, gradient(obj, x));
            axpy(dv, -1.0, signal.eval(t));
            break;
        }
        case SystemKind::HbImplicit: {
            const double damp = 2.0 * std::sqrt(obj.mu);
            Vec shifted = x;
            axpy(shifted, spec.beta, v);
            dv = scaled(v, -damp);
            axpy(dv, -1.0, gradient(obj, shifted));
            axpy(dv, -1.0, signal.eval(t));
            break;
        }
        default:
            throw std::invalid_argument("second_order_rhs: inclusion systems have no smooth form");
    }
    return {v, dv};
}

std::pair<Vec, Vec> first_order_rhs(const SystemSpec& spec, const Objective& obj,
                                    const PerturbationSignal& signal, double t, const Vec& x,
                                    const Vec& y) {
    check_dimension(x, obj.dimension, "first_order_rhs");
    check_dimension(y, obj.dimension, "first_order_rhs");
    if (t < spec.t0) throw std::invalid_argument("first_order_rhs: t < t0");

    switch (spec.kind) {
        case SystemKind::Isehd:
        case SystemKind::HbExplicit: {
            if (!(spec.beta > 0.0))
                throw std::invalid_argument("first_order_rhs: beta must be positive");
            const double b = spec.beta;
            // HB uses the same algebra with alpha/t frozen to 2*sqrt(mu)
            const double visc =
                spec.kind == SystemKind::Isehd ? spec.alpha / t : 2.0 * std::sqrt(obj.mu);
            const double visc_dot = spec.kind == SystemKind::Isehd ? spec.alpha / (t * t) : 0.0;
            Vec dx = scaled(gradient(obj, x), -b);
            axpy(dx, -b, signal.eval(t));
            axpy(dx, 1.0 / b - visc, x);
            axpy(dx, -1.0 / b, y);
            Vec dy = scaled(x, 1.0 / b - visc + b * visc_dot);
            axpy(dy, -1.0 / b, y);
            return {dx, dy};
        }
        case SystemKind::Isihd: {
            const auto [bt, bt_dot] = beta_schedule(spec, t);
            if (!(bt > 0.0)) throw std::invalid_argument("first_order_rhs: beta(t) must be positive");
            Vec dx = sub(y, x);
            for (double& c : dx) c /= bt;
            Vec dy = scaled(gradient(obj, y), -bt);
            axpy(dy, -bt, signal.eval(t));
            const double coef = (1.0 - spec.alpha * bt / t + bt_dot) / bt;
            axpy(dy, -coef, sub(x, y));
            return {dx, dy};
        }
        default:
            throw std::invalid_argument(
                "first_order_rhs: inclusion systems are integrated by the prox schemes");
    }
}

std::pair<Vec, Vec> lift_initial(const SystemSpec& spec, const Objective& obj,
                                 const PerturbationSignal& signal, const Vec& x0, const Vec& v0) {
    check_dimension(x0, obj.dimension, "lift_initial");
    check_dimension(v0, obj.dimension, "lift_initial");
    switch (spec.kind) {
        case SystemKind::Isehd:
        case SystemKind::HbExplicit:
        case SystemKind::IsehdInclusion: {
            if (!(spec.beta > 0.0)) throw std::invalid_argument("lift_initial: beta must be positive");
            const double b = spec.beta;
            const double visc =
                spec.kind == SystemKind::Isehd || spec.kind == SystemKind::IsehdInclusion
                    ? spec.alpha / spec.t0
                    : 2.0 * std::sqrt(obj.mu);
            // y0 = -beta*(v0 + beta*xi0) + (1 - beta*visc)*x0 - beta^2*e(t0),
            // xi0 = grad f(x0) for smooth runs, a subgradient otherwise
            Vec xi0 = spec.kind == SystemKind::IsehdInclusion ? subgradient(obj, x0)
                                                              : gradient(obj, x0);
            Vec y0 = scaled(v0, -b);
            axpy(y0, -b * b, xi0);
            axpy(y0, 1.0 - b * visc, x0);
            if (!signal.is_zero()) axpy(y0, -b * b, signal.eval(spec.t0));
            return {x0, y0};
        }
        case SystemKind::Isihd:
        case SystemKind::HbImplicit:
        case SystemKind::IsihdInclusion: {
            const double bt0 = spec.kind == SystemKind::Isihd
                                   ? beta_schedule(spec, spec.t0).first
                                   : (spec.kind == SystemKind::IsihdInclusion ? spec.gamma
                                                                              : spec.beta);
            Vec y0 = x0;
            axpy(y0, bt0, v0);
            return {x0, y0};
        }
    }
    throw std::logic_error("lift_initial: unreachable");
}

double second_order_residual(const SystemSpec& spec, const Objective& obj,
                             const PerturbationSignal& signal, const Trajectory& traj) {
    const std::size_t n = traj.size();
    if (n < 3) throw std::invalid_argument("second_order_residual: needs at least 3 samples");
    const double h = traj.times[1] - traj.times[0];

    const bool zero_sig = signal.is_zero();
    std::vector<Vec> q(n);  // grad f(x) + e for the explicit residual
    if (spec.kind == SystemKind::Isehd || spec.kind == SystemKind::IsehdInclusion) {
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = spec.kind == SystemKind::IsehdInclusion ? subgradient(obj, traj.x[i])
                                                           : gradient(obj, traj.x[i]);
            if (!zero_sig) axpy(q[i], 1.0, signal.eval(traj.times[i]));
        }
    }

    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double t = traj.times[i];
        Vec xddot(obj.dimension), xdot(obj.dimension);
        for (int k = 0; k < obj.dimension; ++k) {
            xddot[k] = (traj.x[i + 1][k] - 2.0 * traj.x[i][k] + traj.x[i - 1][k]) / (h * h);
            xdot[k] = (traj.x[i + 1][k] - traj.x[i - 1][k]) / (2.0 * h);
        }
        Vec r = xddot;
        axpy(r, spec.alpha / t, xdot);
        if (spec.kind == SystemKind::Isehd || spec.kind == SystemKind::IsehdInclusion) {
            for (int k = 0; k < obj.dimension; ++k)
                r[k] += spec.beta * (q[i + 1][k] - q[i - 1][k]) / (2.0 * h) + q[i][k];
        } else if (spec.kind == SystemKind::Isihd) {
            const double bt = beta_schedule(spec, t).first;
            Vec shifted = traj.x[i];
            axpy(shifted, bt, xdot);
            axpy(r, 1.0, gradient(obj, shifted));
            if (!zero_sig) axpy(r, 1.0, signal.eval(t));
        } else {
            throw std::invalid_argument("second_order_residual: unsupported system kind");
        }
        worst = std::max(worst, norm(r));
    }
    return worst;
}

}  // namespace idyn
