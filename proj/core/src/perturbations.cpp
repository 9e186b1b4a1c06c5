#include "idyn/perturbations.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace idyn {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_time(const PerturbationSignal& s, double t) {
    if (t < s.t_min) throw std::invalid_argument("perturbation evaluated below t_min");
}

}  // namespace

PerturbationSignal zero_signal(int dimension) {
    PerturbationSignal s;
    s.id = "zero";
    s.dimension = dimension;
    s.t_min = 0.0;
    s.eval = [dimension](double) { return zeros(dimension); };
    s.eval_derivative = [dimension](double) { return zeros(dimension); };
    return s;
}

PerturbationSignal cosine_decay(double delta, int dimension, double t_min,
                                const std::vector<int>& components) {
    if (delta < 0.0) throw std::invalid_argument("cosine_decay: delta must be >= 0");
    if (dimension < 1) throw std::invalid_argument("cosine_decay: dimension must be >= 1");
    if (!(t_min > 0.0)) throw std::invalid_argument("cosine_decay: t_min must be positive");

    std::vector<char> mask(dimension, 1);
    if (!components.empty()) {
        mask.assign(dimension, 0);
        for (int c : components) {
            if (c < 0 || c >= dimension) throw std::invalid_argument("cosine_decay: component index");
            mask[c] = 1;
        }
    }

    PerturbationSignal s;
    s.id = "cosine-decay";
    s.dimension = dimension;
    s.delta = delta;
    s.t_min = t_min;
    s.eval = [delta, dimension, mask, t_min](double t) {
        if (t < t_min) throw std::invalid_argument("perturbation evaluated below t_min");
        const double v = std::cos(kTwoPi * t) / std::pow(t, delta);
        Vec e(dimension, 0.0);
        for (int i = 0; i < dimension; ++i)
            if (mask[i]) e[i] = v;
        return e;
    };
    s.eval_derivative = [delta, dimension, mask, t_min](double t) {
        if (t < t_min) throw std::invalid_argument("perturbation evaluated below t_min");
        const double v = -kTwoPi * std::sin(kTwoPi * t) / std::pow(t, delta) -
                         delta * std::cos(kTwoPi * t) / std::pow(t, delta + 1.0);
        Vec e(dimension, 0.0);
        for (int i = 0; i < dimension; ++i)
            if (mask[i]) e[i] = v;
        return e;
    };
    return s;
}

PerturbationSignal custom_signal(std::string id, int dimension, std::function<Vec(double)> eval,
                                 std::function<Vec(double)> eval_derivative, double t_min) {
    PerturbationSignal s;
    s.id = std::move(id);
    s.dimension = dimension;
    s.t_min = t_min;
    s.eval = std::move(eval);
    if (eval_derivative) {
        s.eval_derivative = std::move(eval_derivative);
    } else {
        s.derivative_is_numeric = true;
        auto f = s.eval;
        s.eval_derivative = [f](double t) {
            const double h = 1e-6 * std::max(1.0, t);
            Vec hi = f(t + h), lo = f(t - h);
            Vec d(hi.size());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = (hi[i] - lo[i]) / (2.0 * h);
            return d;
        };
    }
    return s;
}

Vec combine_g(const PerturbationSignal& signal, double beta, double t) {
    check_time(signal, t);
    Vec g = signal.eval(t);
    if (beta != 0.0) axpy(g, beta, signal.eval_derivative(t));
    return g;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double m, double fm,
               double b, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa, double m,
                            double fm, double b, double fb, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, fa, lm, flm, m, fm);
    const double right = simpson(f, m, fm, rm, frm, b, fb);
    const double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    return adaptive_simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                        int max_depth) {
    if (!(b > a)) return 0.0;
    // split into unit-length panels so the oscillatory integrands are resolved
    // before the error estimate is trusted
    const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
    const double tol_per = abs_tol / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double pa = a + (b - a) * k / panels;
        const double pb = a + (b - a) * (k + 1) / panels;
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa), fm = f(pm), fb = f(pb);
        const double whole = simpson(f, pa, fa, pm, fm, pb, fb);
        total += adaptive_simpson_rec(f, pa, fa, pm, fm, pb, fb, whole, tol_per, max_depth);
    }
    if (!std::isfinite(total)) throw std::runtime_error("adaptive_simpson: non-finite integral");
    return total;
}

double moment_integral(const PerturbationSignal& signal, double p, double t0, double T,
                       double abs_tol) {
    if (t0 < signal.t_min) throw std::invalid_argument("moment_integral: t0 below signal t_min");
    if (!(T > t0)) throw std::invalid_argument("moment_integral: T must exceed t0");
    if (p < 0.0) throw std::invalid_argument("moment_integral: p must be >= 0");
    if (signal.is_zero()) return 0.0;
    auto integrand = [&](double t) { return std::pow(t, p) * norm(signal.eval(t)); };
    return adaptive_simpson(integrand, t0, T, abs_tol);
}

const char* to_string(Integrability c) {
    switch (c) {
        case Integrability::Converged: return "converged";
        case Integrability::Diverging: return "diverging";
        default: return "inconclusive";
    }
}

namespace {

// closed-form magnitude estimate of the moment integral, used only to scale
// the quadrature tolerance for classification
double coarse_moment(const PerturbationSignal& signal, double p, double t0, double T) {
    if (!signal.delta) return 1.0;
    const double q = p - *signal.delta;
    const double scale = std::sqrt(norm(signal.eval(t0)) > 0.0 ? signal.dimension : 1.0);
    if (std::abs(q + 1.0) < 1e-12) return scale * std::log(T / t0);
    return scale * std::abs((std::pow(T, q + 1.0) - std::pow(t0, q + 1.0)) / (q + 1.0));
}

}  // namespace

Integrability classify_integrability(const PerturbationSignal& signal, double p) {
    if (signal.is_zero()) return Integrability::Converged;
    const double t0 = signal.t_min;
    // classification compares increments at the 1e-6 scale; a tolerance
    // relative to the integral's magnitude keeps the 1e4 horizon affordable
    auto tol = [&](double T) { return std::max(1e-10, 1e-7 * coarse_moment(signal, p, t0, T)); };
    const double i2 = moment_integral(signal, p, t0, 1e2, tol(1e2));
    const double i3 = moment_integral(signal, p, t0, 1e3, tol(1e3));
    const double i4 = moment_integral(signal, p, t0, 1e4, tol(1e4));
    const double d1 = i3 - i2;
    const double d2 = i4 - i3;
    if (d2 < 1e-6) return Integrability::Converged;
    if (d2 > d1) return Integrability::Diverging;
    // increments shrink but are not yet negligible: a geometric decay ratio
    // means the tail sums to a finite limit
    if (d2 <= 0.2 * d1) return Integrability::Converged;
    return Integrability::Inconclusive;
}

}  // namespace idyn
