#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idyn/vec.hpp"

namespace idyn {

/// Separable scalar coordinate model: a smooth convex piece of one coordinate.
/// The built-in objectives are sums of these plus an optional l1 weight.
struct CoordModel {
    enum class Kind { Quartic, Quadratic };

    Kind kind = Kind::Quadratic;
    double center = 0.0;  // (u - center)^4, or 0.5*curvature*(u - center)^2
    double curvature = 1.0;

    double value(double u) const;
    double grad(double u) const;
    double hess(double u) const;

    /// Exact scalar prox of  s_model + weight*|.|  with step s:
    ///   argmin_u  value(u) + weight*|u| + (u - v)^2 / (2s).
    /// Quadratic models solve in closed form; the quartic model runs a
    /// safeguarded Newton on the optimality condition, bisection fallback on a
    /// bracketing interval around {v, center}, residual driven to round-off.
    double prox(double v, double s, double weight) const;
};

/// Value/gradient/Hessian-vector/prox bundle with convexity metadata.
/// Built-ins are separable; a user objective can plug arbitrary callables.
struct Objective {
    std::string id;
    int dimension = 0;
    std::function<double(const Vec&)> smooth_value;
    std::function<Vec(const Vec&)> smooth_gradient;
    std::function<Vec(const Vec&, const Vec&)> hessian_vector;  // null unless f is C^2
    double nonsmooth_weight = 0.0;                              // coefficient of the l1 term
    std::function<Vec(const Vec&, double)> prox_full;           // prox of smooth + l1
    double mu = 0.0;                                            // strong convexity modulus
    std::optional<double> lipschitz_grad;                       // on the working box
    std::optional<Vec> known_minimizer;
    std::optional<double> known_min_value;

    bool has_hessian() const { return static_cast<bool>(hessian_vector); }
};

/// f(x1,x2) = (x1-1)^4 + (x2-5)^2, unique minimizer (1,5).
Objective make_quartic();

/// Quartic plus weight*(|x1|+|x2|); minimizer/min value left unset (the
/// harness computes them by a prox polish).
Objective make_quartic_l1(double weight = 0.1);

/// 0.5*mu*||x - xstar||^2.
Objective make_quadratic_sc(double mu, Vec xstar);

/// Assemble a separable objective from per-coordinate models.
Objective make_separable(std::string id, std::vector<CoordModel> coords, double nonsmooth_weight);

double value(const Objective& obj, const Vec& x);
Vec gradient(const Objective& obj, const Vec& x);
Vec hessian_vector(const Objective& obj, const Vec& x, const Vec& v);
Vec prox(const Objective& obj, const Vec& v, double s);

/// Minimal-norm subgradient of the full f at x (smooth gradient plus
/// weight*sign with sign(0) = 0).
Vec subgradient(const Objective& obj, const Vec& x);

/// Proximal-point polish: iterate x <- prox(x, s) until the fixed-point
/// residual ||x - prox(x, s)||/s drops below tol. Returns the polished point.
Vec prox_polish(const Objective& obj, Vec x, double s = 10.0, double tol = 1e-12,
                int max_iters = 20000);

}  // namespace idyn
