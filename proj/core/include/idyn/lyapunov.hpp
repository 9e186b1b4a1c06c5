#pragma once

#include <utility>
#include <vector>

#include "idyn/dynamics.hpp"
#include "idyn/objectives.hpp"
#include "idyn/perturbations.hpp"
#include "idyn/vec.hpp"

namespace idyn {

/// A Lyapunov energy sampled along a trajectory. `tail_integrals` holds the
/// truncated error-coupling term int_t^T <., error> (zero at the horizon);
/// `t1` is the threshold below which the decrease claim does not apply.
struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> tail_integrals;
    double t1 = 0.0;
    std::vector<std::pair<std::size_t, double>> violations;  // (index, increase)
};

/// W(t) = 0.5*||udot||^2 + (f(x) - fbar) - int_t^T <udot, g>,
/// udot = xdot + beta*xi (xi = grad f for smooth runs). Valid past
/// t1 = max(t0, 2*alpha*beta). Needs a known minimum value on the objective.
EnergyTrace energy_W(const Trajectory& traj, const Objective& obj,
                     const PerturbationSignal& signal, double alpha, double beta);

/// Fast-rate energy: delta(t)*(f - f*) + 0.5*||v||^2 - int_t^T tau*<v, g>,
/// v = (alpha-1)(x - xstar) + t*(xdot + beta*grad f), delta = t^2*(1 - beta/t).
/// Requires alpha > 3; t1 = max(t0, beta*(alpha-2)/(alpha-3)).
EnergyTrace energy_fast(const Trajectory& traj, const Objective& obj,
                        const PerturbationSignal& signal, double alpha, double beta,
                        const Vec& xstar);

/// Epsilon-generalized fast energy with the extra distance term; requires
/// eps in ]0, alpha-3[.
EnergyTrace energy_eps(const Trajectory& traj, const Objective& obj,
                       const PerturbationSignal& signal, double alpha, double beta, double eps,
                       const Vec& xstar);

/// Non-smooth fast energy with v_lambda = lambda*(x - xstar) + t*udot,
/// udot = xdot + beta*xi; lambda in [2, alpha-1], alpha >= 3; t1 = max(t0, beta).
EnergyTrace energy_lambda(const Trajectory& traj, const Objective& obj,
                          const PerturbationSignal& signal, double alpha, double beta,
                          double lambda, const Vec& xstar);

enum class ScVariant { Explicit, Implicit };

/// Strongly convex heavy-ball energies (no tail integral):
/// explicit: f(x)-fbar + 0.5*||sqrt(mu)(x-x*) + xdot + beta*grad f(x)||^2;
/// implicit: f(x+beta*xdot)-fbar + 0.5*||sqrt(mu)(x-x*) + xdot||^2.
EnergyTrace energy_sc(const Trajectory& traj, const Objective& obj,
                      const PerturbationSignal& signal, double beta, ScVariant variant);

/// Coefficient functions for the implicit-Hessian convex energy:
/// b(t) == b, c(t) = t, d == b*(alpha-1-b), and the rational a(t) chosen so the
/// coefficient equality of the decrease lemma holds identically.
struct ImplicitCoefficients {
    double alpha = 3.1, gamma = 1.0, beta = 1.0;
    double b = 2.05;
    double d = 0.0;
    double pole_upper = 0.0;  // largest time where a(t) has a pole or is negative

    double a(double t) const;
    double a_dot(double t) const;
    double beta_t(double t) const { return gamma + beta / t; }
    double beta_dot(double t) const { return -beta / (t * t); }
};

/// Default b = (alpha+1)/2 clamped into ]2, alpha-1[.
ImplicitCoefficients implicit_coefficients(double alpha, double b, double gamma, double beta);

struct ConditionReport {
    double t1 = 0.0;                      // first grid time past which all six conditions hold
    double max_equality_residual = 0.0;   // third-line residual over the pole-free grid
    bool found = false;
    std::vector<double> first_hold_time;  // per condition, first grid time where it holds onward
};

/// Evaluates the six coefficient conditions on a grid and locates t1.
/// Throws if the conditions never all hold.
ConditionReport check_conditions(const ImplicitCoefficients& coeffs,
                                 const std::vector<double>& grid);

/// Implicit-Hessian convex energy with its two truncated tail integrals.
EnergyTrace energy_implicit_convex(const Trajectory& traj, const Objective& obj,
                                   const PerturbationSignal& signal,
                                   const ImplicitCoefficients& coeffs, double t1,
                                   const Vec& xstar);

/// All indices i with times[i] >= t1 and values[i+1] - values[i] beyond
/// rel_tol * max(|values at t1|, 1e-30).
std::vector<std::pair<std::size_t, double>> check_monotone(const EnergyTrace& trace,
                                                           double rel_tol);

}  // namespace idyn
