#include <doctest.h>

#include <cmath>

#include "idyn/dynamics.hpp"
#include "idyn/integrators.hpp"

using namespace idyn;

namespace {

SystemSpec isehd_spec() { return {SystemKind::Isehd, 3.1, 1.0, 0.0, 1.0}; }
SystemSpec isihd_spec() { return {SystemKind::Isihd, 3.1, 1.0, 1.0, 1.0}; }

}  // namespace

TEST_CASE("beta schedule") {
    SystemSpec s = isihd_spec();
    auto [bt, btdot] = beta_schedule(s, 10.0);
    CHECK(bt == doctest::Approx(1.1));
    CHECK(btdot == doctest::Approx(-0.01));

    s.beta = 0.0;
    for (double t : {0.5, 3.0, 100.0}) {
        auto [b0, bd0] = beta_schedule(s, t);
        CHECK(b0 == doctest::Approx(s.gamma));
        CHECK(bd0 == 0.0);
    }
    s.beta = 1.0;
    s.gamma = 0.0;
    auto [b1, bd1] = beta_schedule(s, 1.0);
    CHECK(b1 == doctest::Approx(1.0));
    CHECK(bd1 == doctest::Approx(-1.0));
    CHECK_THROWS(beta_schedule(s, 0.0));
}

TEST_CASE("second-order right-hand sides") {
    const Objective q = make_quartic();
    const PerturbationSignal z = zero_signal(2);

    auto [dx, dv] = second_order_rhs(isehd_spec(), q, z, 2.0, {1.0, 5.0}, {0.0, 0.0});
    CHECK(norm(dx) == 0.0);
    CHECK(norm(dv) == 0.0);

    auto [dx2, dv2] = second_order_rhs(isihd_spec(), q, z, 1.0, {1.0, 5.0}, {0.0, 0.0});
    CHECK(norm(dv2) == 0.0);

    const Objective sc = make_quadratic_sc(1.0, {0.0, 0.0});
    SystemSpec hb{SystemKind::HbExplicit, 0.0, 0.4, 0.0, 1.0};
    auto [dx3, dv3] = second_order_rhs(hb, sc, z, 1.0, {1.0, 0.0}, {0.0, 0.0});
    CHECK(dv3[0] == doctest::Approx(-1.0));
    CHECK(std::abs(dv3[1]) <= 1e-14);
}

TEST_CASE("first-order right-hand sides") {
    const Objective q = make_quartic();
    const PerturbationSignal z = zero_signal(2);

    // ISIHD vanishes on the diagonal
    auto [dxi, dyi] = first_order_rhs(isihd_spec(), q, z, 3.0, {2.0, 2.0}, {2.0, 2.0});
    CHECK(norm(dxi) == 0.0);

    // hand evaluation at the lifted rest state
    auto [dx1, dy1] = first_order_rhs(isehd_spec(), q, z, 1.0, {1.0, 5.0}, {-2.1, -10.5});
    CHECK(norm(dx1) <= 1e-14);

    auto [dx2, dy2] = first_order_rhs(isehd_spec(), q, z, 2.0, {2.0, 6.0}, {0.0, 0.0});
    CHECK(dx2[0] == doctest::Approx(-5.1));
    CHECK(dx2[1] == doctest::Approx(-5.3));
}

TEST_CASE("initial-condition lifting") {
    const Objective q = make_quartic();
    const PerturbationSignal z = zero_signal(2);

    auto [x0a, y0a] = lift_initial(isihd_spec(), q, z, {-10.0, 20.0}, {5.0, -5.0});
    CHECK(std::abs(y0a[0]) <= 1e-12);
    CHECK(y0a[1] == doctest::Approx(10.0));

    auto [x0b, y0b] = lift_initial(isehd_spec(), q, z, {1.0, 5.0}, {0.0, 0.0});
    CHECK(y0b[0] == doctest::Approx(-2.1));
    CHECK(y0b[1] == doctest::Approx(-10.5));

    auto [x0c, y0c] = lift_initial(isihd_spec(), q, z, {4.0, -7.0}, {0.0, 0.0});
    CHECK(norm(sub(y0c, x0c)) == 0.0);
}

TEST_CASE("lift/project consistency: first equation returns v0 at t0") {
    const Objective q = make_quartic();
    const PerturbationSignal sig = cosine_decay(1.1, 2);
    const Vec x0{-3.0, 7.0}, v0{2.5, -0.5};
    for (SystemSpec spec : {isehd_spec(), isihd_spec()}) {
        auto [xl, yl] = lift_initial(spec, q, sig, x0, v0);
        auto [dx, dy] = first_order_rhs(spec, q, sig, spec.t0, xl, yl);
        CHECK(norm(sub(dx, v0)) <= 1e-12);
    }
}

TEST_CASE("equilibrium preservation for every smooth system") {
    const Objective q = make_quartic();
    const Objective sc = make_quadratic_sc(1.0, {0.0, 0.0});
    const PerturbationSignal z2 = zero_signal(2);

    IntegratorConfig cfg;
    std::vector<SystemSpec> specs = {isehd_spec(), isihd_spec(),
                                     {SystemKind::HbExplicit, 0.0, 0.4, 0.0, 1.0},
                                     {SystemKind::HbImplicit, 0.0, 0.4, 0.0, 1.0}};
    for (const SystemSpec& spec : specs) {
        const bool hb =
            spec.kind == SystemKind::HbExplicit || spec.kind == SystemKind::HbImplicit;
        const Objective& obj = hb ? sc : q;
        const Vec xstar = *obj.known_minimizer;
        auto [dx, dv] = second_order_rhs(spec, obj, z2, 1.0, xstar, zeros(2));
        CHECK(norm(dv) == 0.0);
        Trajectory traj = integrate_system(spec, obj, z2, 10.0, xstar, zeros(2), cfg);
        for (const Vec& x : traj.x) CHECK(norm(sub(x, xstar)) <= 1e-9);
    }
}

TEST_CASE("second-order vs first-order equivalence on a short horizon") {
    const Objective q = make_quartic();
    const PerturbationSignal z = zero_signal(2);
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-10;
    std::vector<double> grid(400);
    for (int i = 0; i < 400; ++i) grid[i] = 1.0 + 9.0 * i / 399.0;
    cfg.output_times = grid;

    for (SystemSpec spec : {isehd_spec(), isihd_spec()}) {
        Trajectory direct =
            integrate_system(spec, q, z, 10.0, {-10.0, 20.0}, {5.0, -5.0}, cfg, false);
        Trajectory lifted =
            integrate_system(spec, q, z, 10.0, {-10.0, 20.0}, {5.0, -5.0}, cfg, true);
        REQUIRE(direct.size() == lifted.size());
        double sup = 0.0;
        for (std::size_t i = 0; i < direct.size(); ++i)
            sup = std::max(sup, norm(sub(direct.x[i], lifted.x[i])));
        CHECK(sup <= 1e-5);
    }
}

TEST_CASE("second-order residual: equilibrium and negative control") {
    const Objective q = make_quartic();
    const PerturbationSignal z = zero_signal(2);

    Trajectory eq;
    eq.companion_kind = CompanionKind::Velocity;
    for (int i = 0; i <= 100; ++i) {
        eq.times.push_back(1.0 + 1e-3 * i);
        eq.x.push_back({1.0, 5.0});
        eq.companion.push_back({0.0, 0.0});
    }
    CHECK(second_order_residual(isehd_spec(), q, z, eq) <= 1e-10);
    CHECK(second_order_residual(isihd_spec(), q, z, eq) <= 1e-10);

    // free motion x(t) = x0 + t*v is not a solution of the damped system
    Trajectory free_motion;
    free_motion.companion_kind = CompanionKind::Velocity;
    for (int i = 0; i <= 100; ++i) {
        const double t = 1.0 + 1e-3 * i;
        free_motion.times.push_back(t);
        free_motion.x.push_back({-10.0 + 5.0 * t, 20.0 - 5.0 * t});
        free_motion.companion.push_back({5.0, -5.0});
    }
    CHECK(second_order_residual(isehd_spec(), q, z, free_motion) > 1.0);

    Trajectory too_short = eq;
    too_short.times.resize(2);
    too_short.x.resize(2);
    too_short.companion.resize(2);
    CHECK_THROWS(second_order_residual(isehd_spec(), q, z, too_short));
}

TEST_CASE("system validation") {
    const Objective q = make_quartic();
    SystemSpec bad = isehd_spec();
    bad.beta = 0.0;
    CHECK_THROWS(validate(bad, q));

    SystemSpec hb{SystemKind::HbExplicit, 0.0, 0.4, 0.0, 1.0};
    CHECK_THROWS(validate(hb, q));  // mu = 0

    const Objective sc = make_quadratic_sc(1.0, {0.0, 0.0});
    CHECK(validate(hb, sc).empty());
    hb.beta = 0.7;  // beyond 1/(2*sqrt(mu)) = 0.5
    const auto warnings = validate(hb, sc);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("1/(2*sqrt(mu))") != std::string::npos);

    SystemSpec incl{SystemKind::IsihdInclusion, 3.1, 1.0, 1.0, 1.0};
    CHECK_THROWS(validate(incl, q));  // time-varying beta rejected
}
