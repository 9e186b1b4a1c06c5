#pragma once

#include <functional>
#include <vector>

#include "idyn/dynamics.hpp"
#include "idyn/objectives.hpp"
#include "idyn/perturbations.hpp"
#include "idyn/vec.hpp"

namespace idyn {

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 0.1;
    std::vector<double> output_times;  // empty: report every accepted step

    void validate() const;
};

using RhsFn = std::function<Vec(double, const Vec&)>;

/// Raw solution samples of a first-order ODE system.
struct OdeSolution {
    std::vector<double> times;
    std::vector<Vec> states;
    long accepted_steps = 0;
    long rejected_steps = 0;
    long rhs_evaluations = 0;
};

/// Adaptive embedded Dormand-Prince 5(4) pair with PI step control and the
/// pair's quartic dense-output interpolant. Local error per step is kept
/// below abs_tol + rel_tol*|state| componentwise. Throws on step underflow
/// (reporting the blow-up time) and on non-finite states.
OdeSolution integrate_rk(const RhsFn& rhs, double t0, double T, Vec init,
                         const IntegratorConfig& cfg);

/// Fixed-step semi-implicit proximal scheme for the explicit-Hessian
/// differential inclusion: the multivalued term is handled by a backward prox
/// step on x, the affine drift forward. Recovered subgradients land in
/// Trajectory::xi with xi[k] in the subdifferential at x[k].
Trajectory integrate_prox_explicit(const SystemSpec& spec, const Objective& obj,
                                   const PerturbationSignal& signal, double t0, double T,
                                   const Vec& x0, const Vec& y0, double h,
                                   const std::vector<double>& output_times = {});

/// Fixed-step scheme for the implicit-Hessian inclusion with constant
/// beta(t) == gamma: prox backward step on y, explicit x update.
Trajectory integrate_prox_implicit(const SystemSpec& spec, const Objective& obj,
                                   const PerturbationSignal& signal, double t0, double T,
                                   const Vec& x0, const Vec& y0, double h,
                                   const std::vector<double>& output_times = {});

/// Change of time variable tau(s) defined by beta(tau(s))*tau'(s) = 1,
/// i.e. tau inverts p(t) = int_{t0}^{t} beta. Lets a time-varying-beta
/// implicit inclusion run as a constant-coefficient one.
struct TimeRescale {
    double t0 = 0.0;
    std::function<double(double)> primitive;  // p(t)
    std::function<double(double)> tau;        // s -> tau(s), tau(0) = t0
};

TimeRescale time_rescale(const std::function<double(double)>& beta_fn, double t0,
                         double horizon = 1e4);

/// Integrate a smooth SystemSpec into a Trajectory. `first_order` selects the
/// (x,y) reformulation; otherwise the direct second-order form is used when
/// the objective supports it.
Trajectory integrate_system(const SystemSpec& spec, const Objective& obj,
                            const PerturbationSignal& signal, double T, const Vec& x0,
                            const Vec& v0, const IntegratorConfig& cfg, bool first_order = false);

/// Fill f_gap / grad_norm columns given a reference minimum value.
void finalize_trajectory(Trajectory& traj, const Objective& obj, double fbar);

}  // namespace idyn
