#pragma once

#include <functional>
#include <string>
#include <vector>

#include "idyn/lyapunov.hpp"
#include "idyn/objectives.hpp"
#include "idyn/perturbations.hpp"

namespace idyn {

enum class RateClass { Fast, Degraded, Stagnant };

const char* to_string(RateClass c);

struct RateReport {
    double t_lo = 0.0, t_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    RateClass classification = RateClass::Degraded;
};

/// Ordinary least squares of log(values) against log(times) over the window.
/// Values are clamped at 1e-300; needs at least 10 in-window samples.
/// Classification: fast when slope <= -1.8, stagnant when slope > -0.05.
RateReport fit_rate(const std::vector<double>& times, const std::vector<double>& values,
                    double t_lo, double t_hi);

/// Rate fit on a log-spaced 200-point resample of the series (the pipeline the
/// scenario reports use; linear interpolation in value).
RateReport fit_rate_resampled(const std::vector<double>& times,
                              const std::vector<double>& values, double t_lo, double t_hi,
                              int points = 200);

struct GronwallReport {
    bool hypothesis_ok = false;  // 0.5*w^2 <= 0.5*c^2 + int m*w held on the samples
    bool conclusion_ok = false;  // |w| <= c + int m held (tolerance 1e-8)
    double max_slack = 0.0;      // max over samples of |w| - (c + int m)
};

/// Numerical Gronwall verifier: checks the hypothesis by trapezoid quadrature
/// and only then asserts the conclusion |w(t)| <= c + int_{t0}^t m.
GronwallReport gronwall_verify(const std::vector<double>& times, const std::vector<double>& w,
                               const std::vector<double>& m, double c);

/// Trapezoid evaluation of (1/phi(t)) * int_{t0}^t phi(s) f(s) ds.
double kronecker_mean(const std::function<double(double)>& f,
                      const std::function<double(double)>& phi, double t0, double t,
                      int grid_points = 20001);

struct ScBoundReport {
    bool ok = false;
    double min_slack = 0.0;  // min over samples of bound - energy
    double bound_at_end = 0.0;
    double big_m = 0.0;
};

/// Pointwise exponential-decay bound check for the strongly convex energies:
///   E(t) <= E(t0)*exp(-r(t-t0)) + M*exp(-rt)*int_{t0}^t exp(r*tau)*||err||,
/// r = sqrt(mu)/2; the explicit variant drives the bound with ||g|| and
/// M = sqrt(2 E(t0)) + int ||g||, the implicit one with ||e|| and the
/// Lipschitz-dependent constant c = min(mu,1)/(4 max(beta^2 L^2, 1)).
ScBoundReport sc_bound_check(const EnergyTrace& trace, const Objective& obj,
                             const PerturbationSignal& signal, double beta, ScVariant variant);

}  // namespace idyn
