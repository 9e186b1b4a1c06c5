#include "idyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace idyn {

const char* to_string(RateClass c) {
    switch (c) {
        case RateClass::Fast: return "fast";
        case RateClass::Degraded: return "degraded";
        default: return "stagnant";
    }
}

RateReport fit_rate(const std::vector<double>& times, const std::vector<double>& values,
                    double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw std::invalid_argument("fit_rate: window must satisfy t_lo < t_hi");
    std::vector<double> lt, lv;
    bool any_above_clamp = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        const double v = std::max(values[i], 1e-300);
        any_above_clamp = any_above_clamp || values[i] > 1e-300;
        lt.push_back(std::log(times[i]));
        lv.push_back(std::log(v));
    }
    if (lt.size() < 10) throw std::invalid_argument("fit_rate: fewer than 10 samples in window");
    if (!any_above_clamp)
        throw std::invalid_argument("fit_rate: all values nonpositive after clamping");

    const double n = static_cast<double>(lt.size());
    double st = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        st += lt[i];
        sv += lv[i];
    }
    const double mt = st / n, mv = sv / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        sxx += (lt[i] - mt) * (lt[i] - mt);
        sxy += (lt[i] - mt) * (lv[i] - mv);
    }
    RateReport r;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    r.slope = sxy / sxx;
    r.intercept = mv - r.slope * mt;
    double ss = 0.0;
    for (std::size_t i = 0; i < lt.size(); ++i) {
        const double res = lv[i] - (r.intercept + r.slope * lt[i]);
        ss += res * res;
    }
    r.residual_rms = std::sqrt(ss / n);
    r.classification = r.slope <= -1.8 ? RateClass::Fast
                       : r.slope > -0.05 ? RateClass::Stagnant
                                         : RateClass::Degraded;
    return r;
}

RateReport fit_rate_resampled(const std::vector<double>& times,
                              const std::vector<double>& values, double t_lo, double t_hi,
                              int points) {
    if (times.size() < 2) throw std::invalid_argument("fit_rate_resampled: too few samples");
    const double lo = std::max(t_lo, times.front());
    const double hi = std::min(t_hi, times.back());
    std::vector<double> tq(points), vq(points);
    std::size_t j = 0;
    for (int k = 0; k < points; ++k) {
        tq[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
        while (j + 2 < times.size() && times[j + 1] < tq[k]) ++j;
        const double t0 = times[j], t1 = times[j + 1];
        const double w = std::clamp((tq[k] - t0) / (t1 - t0), 0.0, 1.0);
        vq[k] = (1.0 - w) * values[j] + w * values[j + 1];
    }
    return fit_rate(tq, vq, lo * (1.0 - 1e-12), hi * (1.0 + 1e-12));
}

GronwallReport gronwall_verify(const std::vector<double>& times, const std::vector<double>& w,
                               const std::vector<double>& m, double c) {
    if (times.size() != w.size() || times.size() != m.size() || times.size() < 2)
        throw std::invalid_argument("gronwall_verify: mismatched or too-short samples");
    GronwallReport report;
    report.hypothesis_ok = true;
    double int_mw = 0.0, int_m = 0.0;
    report.max_slack = std::abs(w[0]) - c;
    // hypothesis tolerance scales with the trapezoid resolution
    const double hyp_tol = 1e-9 * std::max(1.0, std::abs(c));
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) {
            const double dt = times[i] - times[i - 1];
            int_mw += 0.5 * dt * (m[i] * w[i] + m[i - 1] * w[i - 1]);
            int_m += 0.5 * dt * (m[i] + m[i - 1]);
        }
        if (0.5 * w[i] * w[i] > 0.5 * c * c + int_mw + hyp_tol) report.hypothesis_ok = false;
        report.max_slack = std::max(report.max_slack, std::abs(w[i]) - (c + int_m));
    }
    report.conclusion_ok = report.hypothesis_ok && report.max_slack <= 1e-8;
    return report;
}

double kronecker_mean(const std::function<double(double)>& f,
                      const std::function<double(double)>& phi, double t0, double t,
                      int grid_points) {
    if (!(t > t0)) throw std::invalid_argument("kronecker_mean: t must exceed t0");
    double integral = 0.0;
    double prev_t = t0, prev_v = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double s = t0 + (t - t0) * i / (grid_points - 1);
        const double p = phi(s);
        if (!(p > 0.0)) throw std::invalid_argument("kronecker_mean: phi must be positive");
        const double v = p * f(s);
        if (i > 0) integral += 0.5 * (s - prev_t) * (v + prev_v);
        prev_t = s;
        prev_v = v;
    }
    return integral / phi(t);
}

ScBoundReport sc_bound_check(const EnergyTrace& trace, const Objective& obj,
                             const PerturbationSignal& signal, double beta, ScVariant variant) {
    if (!(obj.mu > 0.0)) throw std::invalid_argument("sc_bound_check: requires mu > 0");
    if (variant == ScVariant::Implicit && !obj.lipschitz_grad)
        throw std::invalid_argument("sc_bound_check: implicit variant needs the Lipschitz constant");
    const double rate = 0.5 * std::sqrt(obj.mu);
    const double t0 = trace.times.front();
    const double e0 = trace.values.front();

    auto err_norm = [&](double t) {
        if (signal.is_zero()) return 0.0;
        return variant == ScVariant::Explicit ? norm(combine_g(signal, beta, t))
                                              : norm(signal.eval(t));
    };

    // M uses the full error integral; extend well past the trajectory horizon
    double big_m;
    double int_err = 0.0;
    if (!signal.is_zero()) {
        const double far = std::max(trace.times.back(), 1e4);
        int_err = adaptive_simpson(err_norm, std::max(t0, signal.t_min), far, 1e-9);
    }
    if (variant == ScVariant::Explicit) {
        big_m = std::sqrt(2.0 * e0) + int_err;
    } else {
        const double l = *obj.lipschitz_grad;
        const double c = std::min(obj.mu, 1.0) / (4.0 * std::max(beta * beta * l * l, 1.0));
        big_m = std::sqrt(e0 / c) + int_err / (2.0 * c);
    }

    ScBoundReport report;
    report.big_m = big_m;
    report.min_slack = std::numeric_limits<double>::infinity();
    double weighted = 0.0;  // int_{t0}^t exp(rate*(tau - t0)) * err
    double prev_t = t0, prev_v = err_norm(t0);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (i > 0) {
            const double v = err_norm(t);
            weighted += 0.5 * (t - prev_t) *
                        (std::exp(rate * (prev_t - t0)) * prev_v + std::exp(rate * (t - t0)) * v);
            prev_t = t;
            prev_v = v;
        }
        const double bound = e0 * std::exp(-rate * (t - t0)) +
                             big_m * std::exp(-rate * (t - t0)) * weighted;
        report.min_slack = std::min(report.min_slack, bound - trace.values[i]);
        if (i + 1 == trace.times.size()) report.bound_at_end = bound;
    }
    report.ok = report.min_slack >= -1e-6 * std::max(e0, 1e-30);
    return report;
}

}  // namespace idyn
