#pragma once

#include <string>
#include <utility>
#include <vector>

#include "idyn/objectives.hpp"
#include "idyn/perturbations.hpp"
#include "idyn/vec.hpp"

namespace idyn {

enum class SystemKind {
    Isehd,           // inertial system, explicit Hessian damping, alpha/t viscosity
    Isihd,           // implicit Hessian damping via gradient at x + beta(t)*xdot
    HbExplicit,      // heavy ball 2*sqrt(mu) damping, explicit Hessian term
    HbImplicit,      // heavy ball damping, implicit Hessian term
    IsehdInclusion,  // non-smooth explicit system as a differential inclusion
    IsihdInclusion,  // non-smooth implicit system, constant beta(t) == gamma
};

const char* to_string(SystemKind k);
SystemKind system_kind_from_string(const std::string& s);

struct SystemSpec {
    SystemKind kind = SystemKind::Isehd;
    double alpha = 3.1;  // viscous damping numerator, gamma(t) = alpha/t
    double beta = 1.0;   // Hessian-damping coefficient / beta(t) offset
    double gamma = 0.0;  // ISIHD only: constant part of beta(t) = gamma + beta/t
    double t0 = 1.0;

    bool is_explicit_family() const {
        return kind == SystemKind::Isehd || kind == SystemKind::HbExplicit ||
               kind == SystemKind::IsehdInclusion;
    }
    bool is_inclusion() const {
        return kind == SystemKind::IsehdInclusion || kind == SystemKind::IsihdInclusion;
    }
};

/// Throws on hard precondition violations; returns soft warnings (e.g. the
/// heavy-ball beta threshold beta <= 1/(2*sqrt(mu))).
std::vector<std::string> validate(const SystemSpec& spec, const Objective& obj);

enum class CompanionKind { Velocity, Auxiliary };

/// Sampled solution record. `companion` holds the velocity for second-order
/// integrations and the auxiliary y for first-order / inclusion runs.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> x;
    std::vector<Vec> companion;
    CompanionKind companion_kind = CompanionKind::Velocity;
    std::vector<Vec> xi;  // recovered subgradients, inclusion runs only; xi[k] in df(x[k])
    std::vector<double> f_gap;
    std::vector<double> grad_norm;

    std::size_t size() const { return times.size(); }
};

/// (beta(t), beta_dot(t)) for beta(t) = gamma + beta/t.
std::pair<double, double> beta_schedule(const SystemSpec& spec, double t);

/// Right-hand side of the second-order form: returns (dx, dv).
std::pair<Vec, Vec> second_order_rhs(const SystemSpec& spec, const Objective& obj,
                                     const PerturbationSignal& signal, double t, const Vec& x,
                                     const Vec& v);

/// Right-hand side of the first-order (x, y) reformulation.
std::pair<Vec, Vec> first_order_rhs(const SystemSpec& spec, const Objective& obj,
                                    const PerturbationSignal& signal, double t, const Vec& x,
                                    const Vec& y);

/// Lift (x0, v0) to the first-order initial pair (x0, y0).
std::pair<Vec, Vec> lift_initial(const SystemSpec& spec, const Objective& obj,
                                 const PerturbationSignal& signal, const Vec& x0, const Vec& v0);

/// Max norm, over interior samples of a uniformly spaced trajectory, of the
/// second-order equation residual with all time derivatives reconstructed by
/// central differences of the sampled quantities.
double second_order_residual(const SystemSpec& spec, const Objective& obj,
                             const PerturbationSignal& signal, const Trajectory& traj);

}  // namespace idyn
