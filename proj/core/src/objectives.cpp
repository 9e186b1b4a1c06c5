#include "idyn/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

namespace idyn {

double CoordModel::value(double u) const {
    const double d = u - center;
    return kind == Kind::Quartic ? d * d * d * d : 0.5 * curvature * d * d;
}

double CoordModel::grad(double u) const {
    const double d = u - center;
    return kind == Kind::Quartic ? 4.0 * d * d * d : curvature * d;
}

double CoordModel::hess(double u) const {
    const double d = u - center;
    return kind == Kind::Quartic ? 12.0 * d * d : curvature;
}

namespace {

// Safeguarded Newton for g(u) = model.grad(u) + (u - w)/s = 0 on a bracket
// where g(lo) <= 0 <= g(hi). g is strictly increasing (g' >= 1/s).
double solve_scalar_prox(const CoordModel& m, double w, double s, double lo, double hi) {
    auto g = [&](double u) { return m.grad(u) + (u - w) / s; };
    // expand the bracket if the initial guess missed the root
    double glo = g(lo), ghi = g(hi);
    double width = hi - lo;
    int expand = 0;
    while (glo > 0.0 && expand < 64) {
        lo -= width;
        width *= 2.0;
        glo = g(lo);
        ++expand;
    }
    while (ghi < 0.0 && expand < 64) {
        hi += width;
        width *= 2.0;
        ghi = g(hi);
        ++expand;
    }
    if (glo > 0.0 || ghi < 0.0) throw std::runtime_error("prox: failed to bracket scalar root");

    double u = 0.5 * (lo + hi);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 100; ++it) {
        const double gu = g(u);
        const double scale = std::max({1.0, std::abs(m.grad(u)), std::abs(u - w) / s});
        if (std::abs(gu) <= 4.0 * eps * scale) return u;
        if (gu > 0.0)
            hi = u;
        else
            lo = u;
        const double dg = m.hess(u) + 1.0 / s;
        double step = u - gu / dg;
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);  // bisection fallback
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(u)))
            return 0.5 * (lo + hi);
        u = step;
    }
    throw std::runtime_error("prox: scalar solve did not converge in 100 iterations");
}

}  // namespace

double CoordModel::prox(double v, double s, double weight) const {
    if (!(s > 0.0)) throw std::invalid_argument("prox: step must be positive");
    if (weight < 0.0) throw std::invalid_argument("prox: negative l1 weight");

    auto solve_branch = [&](double w) {
        if (kind == Kind::Quadratic) return (curvature * s * center + w) / (1.0 + curvature * s);
        const double lo = std::min(w, center) - 1.0;
        const double hi = std::max(w, center) + 1.0;
        return solve_scalar_prox(*this, w, s, lo, hi);
    };

    if (weight == 0.0) return solve_branch(v);
    // l1 shrinkage composed with the smooth scalar solve: the positive branch
    // solves grad(u) + w + (u - v)/s = 0, the negative branch uses -w; if
    // neither sign is consistent the solution sits at zero.
    const double up = solve_branch(v - s * weight);
    if (up > 0.0) return up;
    const double um = solve_branch(v + s * weight);
    if (um < 0.0) return um;
    return 0.0;
}

Objective make_separable(std::string id, std::vector<CoordModel> coords, double nonsmooth_weight) {
    const int n = static_cast<int>(coords.size());
    auto shared = std::make_shared<std::vector<CoordModel>>(std::move(coords));

    Objective obj;
    obj.id = std::move(id);
    obj.dimension = n;
    obj.nonsmooth_weight = nonsmooth_weight;
    obj.smooth_value = [shared](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < shared->size(); ++i) s += (*shared)[i].value(x[i]);
        return s;
    };
    obj.smooth_gradient = [shared](const Vec& x) {
        Vec g(shared->size());
        for (std::size_t i = 0; i < shared->size(); ++i) g[i] = (*shared)[i].grad(x[i]);
        return g;
    };
    obj.hessian_vector = [shared](const Vec& x, const Vec& v) {
        Vec r(shared->size());
        for (std::size_t i = 0; i < shared->size(); ++i) r[i] = (*shared)[i].hess(x[i]) * v[i];
        return r;
    };
    const double w = nonsmooth_weight;
    obj.prox_full = [shared, w](const Vec& v, double s) {
        Vec p(shared->size());
        for (std::size_t i = 0; i < shared->size(); ++i) p[i] = (*shared)[i].prox(v[i], s, w);
        return p;
    };
    return obj;
}

Objective make_quartic() {
    std::vector<CoordModel> coords = {
        {CoordModel::Kind::Quartic, 1.0, 0.0},
        {CoordModel::Kind::Quadratic, 5.0, 2.0},
    };
    Objective obj = make_separable("quartic", std::move(coords), 0.0);
    obj.known_minimizer = Vec{1.0, 5.0};
    obj.known_min_value = 0.0;
    // gradient Lipschitz constant on the working box [-20,20]^2: max(12*21^2, 2)
    obj.lipschitz_grad = 12.0 * 21.0 * 21.0;
    return obj;
}

Objective make_quartic_l1(double weight) {
    std::vector<CoordModel> coords = {
        {CoordModel::Kind::Quartic, 1.0, 0.0},
        {CoordModel::Kind::Quadratic, 5.0, 2.0},
    };
    Objective obj = make_separable("quartic-l1", std::move(coords), weight);
    obj.hessian_vector = nullptr;  // full f is not C^2
    obj.lipschitz_grad = 12.0 * 21.0 * 21.0;
    return obj;
}

Objective make_quadratic_sc(double mu, Vec xstar) {
    if (!(mu > 0.0)) throw std::invalid_argument("quadratic-sc requires mu > 0");
    std::vector<CoordModel> coords;
    coords.reserve(xstar.size());
    for (double c : xstar) coords.push_back({CoordModel::Kind::Quadratic, c, mu});
    Objective obj = make_separable("quadratic-sc", std::move(coords), 0.0);
    obj.mu = mu;
    obj.lipschitz_grad = mu;
    obj.known_minimizer = std::move(xstar);
    obj.known_min_value = 0.0;
    return obj;
}

double value(const Objective& obj, const Vec& x) {
    check_dimension(x, obj.dimension, "value");
    double v = obj.smooth_value(x);
    if (obj.nonsmooth_weight > 0.0) v += obj.nonsmooth_weight * norm_l1(x);
    return v;
}

Vec gradient(const Objective& obj, const Vec& x) {
    check_dimension(x, obj.dimension, "gradient");
    return obj.smooth_gradient(x);
}

Vec hessian_vector(const Objective& obj, const Vec& x, const Vec& v) {
    check_dimension(x, obj.dimension, "hessian_vector");
    check_dimension(v, obj.dimension, "hessian_vector");
    if (!obj.hessian_vector) throw std::runtime_error("Hessian unavailable for objective " + obj.id);
    return obj.hessian_vector(x, v);
}

Vec prox(const Objective& obj, const Vec& v, double s) {
    check_dimension(v, obj.dimension, "prox");
    if (!(s > 0.0)) throw std::invalid_argument("prox: step must be positive");
    return obj.prox_full(v, s);
}

Vec subgradient(const Objective& obj, const Vec& x) {
    Vec g = gradient(obj, x);
    if (obj.nonsmooth_weight > 0.0) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (x[i] > 0.0)
                g[i] += obj.nonsmooth_weight;
            else if (x[i] < 0.0)
                g[i] -= obj.nonsmooth_weight;
        }
    }
    return g;
}

Vec prox_polish(const Objective& obj, Vec x, double s, double tol, int max_iters) {
    for (int it = 0; it < max_iters; ++it) {
        Vec p = prox(obj, x, s);
        const double res = norm(sub(x, p)) / s;
        x = std::move(p);
        if (res <= tol) return x;
    }
    return x;
}

}  // namespace idyn
