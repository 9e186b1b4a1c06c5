#pragma once

#include <functional>
#include <optional>
#include <string>

#include "idyn/vec.hpp"

namespace idyn {

/// Time-dependent gradient error e(t) with its derivative and decay metadata.
struct PerturbationSignal {
    std::string id;
    int dimension = 0;
    std::function<Vec(double)> eval;
    std::function<Vec(double)> eval_derivative;
    bool derivative_is_numeric = false;  // true when the derivative is a central difference
    std::optional<double> delta;         // decay exponent of the cosine-decay family
    double t_min = 1.0;

    bool is_zero() const { return id == "zero"; }
};

/// e(t) identically zero.
PerturbationSignal zero_signal(int dimension);

/// e(t) = cos(2*pi*t)/t^delta on every component (components can be
/// restricted to a subset; the rest stay zero).
PerturbationSignal cosine_decay(double delta, int dimension, double t_min = 1.0,
                                const std::vector<int>& components = {});

/// Wrap arbitrary callables; if no derivative is supplied a central
/// difference with h = 1e-6*max(1,t) is used and flagged.
PerturbationSignal custom_signal(std::string id, int dimension, std::function<Vec(double)> eval,
                                 std::function<Vec(double)> eval_derivative = nullptr,
                                 double t_min = 1.0);

/// g(t) = e(t) + beta*de/dt(t), the combined error term of the explicit system.
Vec combine_g(const PerturbationSignal& signal, double beta, double t);

/// Adaptive-Simpson quadrature of  int_{t0}^{T} t^p * ||e(t)|| dt.
double moment_integral(const PerturbationSignal& signal, double p, double t0, double T,
                       double abs_tol = 1e-10);

enum class Integrability { Converged, Diverging, Inconclusive };

const char* to_string(Integrability c);

/// Compares moment integrals over nested horizons T in {1e2, 1e3, 1e4}:
/// converged when the latest increment is negligible or the increments decay
/// geometrically, diverging when they grow.
Integrability classify_integrability(const PerturbationSignal& signal, double p);

/// Adaptive Simpson on a scalar function (exposed for reuse by the analysis
/// verifiers).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_depth = 26);

}  // namespace idyn
