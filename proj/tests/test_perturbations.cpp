#include <doctest.h>

#include <cmath>
#include <random>

#include "idyn/perturbations.hpp"

using namespace idyn;

TEST_CASE("cosine decay values and derivative") {
    const PerturbationSignal s31 = cosine_decay(3.1, 2);
    CHECK(s31.eval(1.0)[0] == doctest::Approx(1.0));
    CHECK(s31.eval(1.0)[1] == doctest::Approx(1.0));

    const PerturbationSignal s11 = cosine_decay(1.1, 1);
    CHECK(std::abs(s11.eval(1.25)[0]) <= 1e-12);
    CHECK(s11.eval_derivative(1.0)[0] == doctest::Approx(-1.1));

    CHECK_THROWS(s11.eval(0.5));
    CHECK_THROWS(cosine_decay(-1.0, 2));
}

TEST_CASE("derivative matches central differences; decay envelope holds") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ts(1.0, 50.0);
    for (double delta : {0.1, 1.1, 3.1}) {
        const PerturbationSignal s = cosine_decay(delta, 2);
        for (int k = 0; k < 100; ++k) {
            const double t = ts(rng);
            const double h = 1e-6 * std::max(1.0, t);
            const Vec fd = scaled(sub(s.eval(t + h), s.eval(t - h)), 0.5 / h);
            const Vec an = s.eval_derivative(t);
            CHECK(norm(sub(an, fd)) <= 1e-5 * std::max(1.0, norm(an)));
            CHECK(norm_inf(s.eval(t)) <= std::pow(t, -delta) + 1e-15);
        }
    }
}

TEST_CASE("combine_g") {
    const PerturbationSignal s = cosine_decay(1.1, 2);
    CHECK(combine_g(s, 0.0, 7.3)[0] == doctest::Approx(s.eval(7.3)[0]).epsilon(1e-14));
    CHECK(combine_g(s, 1.0, 1.0)[0] == doctest::Approx(-0.1));
    CHECK(norm(combine_g(zero_signal(2), 1.0, 2.0)) == 0.0);
}

TEST_CASE("moment integrals: frozen regression values and bounds") {
    CHECK(moment_integral(zero_signal(3), 1.0, 1.0, 100.0) == 0.0);

    // scalar signal; values frozen from an independent quadrature oracle
    const PerturbationSignal s = cosine_decay(3.1, 1);
    const double m0 = moment_integral(s, 0.0, 1.0, 1000.0);
    CHECK(m0 == doctest::Approx(0.310252466695).epsilon(1e-7));
    CHECK(m0 > 0.0);
    CHECK(m0 <= 1.0 / 2.1);

    const double m2 = moment_integral(s, 2.0, 1.0, 1000.0);
    CHECK(m2 == doctest::Approx(3.178263558117).epsilon(1e-7));
    CHECK(m2 <= 10.0);

    CHECK_THROWS(moment_integral(s, 1.0, 1.0, 0.5));
    CHECK_THROWS(moment_integral(s, 0.0, 0.1, 10.0));
}

TEST_CASE("moment integral is nondecreasing in T and below the envelope integral") {
    const PerturbationSignal s = cosine_decay(1.1, 1);
    double prev = 0.0;
    for (double T : {5.0, 10.0, 50.0, 200.0}) {
        const double m = moment_integral(s, 1.0, 1.0, T);
        CHECK(m >= prev - 1e-12);
        prev = m;
        // envelope: integrand <= t^{p-delta}
        const double envelope = (std::pow(T, 0.9) - 1.0) / 0.9;
        CHECK(m <= envelope + 1e-9);
    }
}

TEST_CASE("integrability classification") {
    CHECK(classify_integrability(cosine_decay(3.1, 2), 1.0) == Integrability::Converged);
    CHECK(classify_integrability(cosine_decay(0.1, 2), 0.0) == Integrability::Diverging);
    CHECK(classify_integrability(cosine_decay(1.1, 2), 1.0) == Integrability::Diverging);
    CHECK(classify_integrability(zero_signal(2), 2.0) == Integrability::Converged);
}

TEST_CASE("numeric-derivative fallback is flagged") {
    auto ev = [](double t) { return Vec{std::sin(t)}; };
    const PerturbationSignal s = custom_signal("wave", 1, ev);
    CHECK(s.derivative_is_numeric);
    CHECK(s.eval_derivative(2.0)[0] == doctest::Approx(std::cos(2.0)).epsilon(1e-8));
}
