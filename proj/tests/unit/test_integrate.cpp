#include <doctest.h>

#include "memlag/curve.hpp"
#include "memlag/integrate.hpp"

#include <cmath>

using namespace memlag;

namespace {

const Rhs kOscillator = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
};

double max_error_vs_cos(const Solution& s) {
    double e = 0.0;
    for (std::size_t k = 0; k < s.t.size(); ++k) e = std::max(e, std::fabs(s.y[k][0] - std::cos(s.t[k])));
    return e;
}

} // namespace

TEST_CASE("rk4 on the harmonic oscillator") {
    IntegratorControl c;
    c.method = Method::rk4;
    c.h = 1e-3;
    const std::array<double, 2> y0{1.0, 0.0};
    const Solution s = integrate(kOscillator, y0, 0.0, 2.0 * M_PI, c);
    CHECK(s.method == Method::rk4);
    CHECK(s.t.back() == 2.0 * M_PI);
    CHECK(std::fabs(s.y.back()[0] - 1.0) <= 1e-6);
    CHECK(max_error_vs_cos(s) <= 1e-12);
    for (std::size_t k = 1; k < s.t.size(); ++k) REQUIRE(s.t[k] > s.t[k - 1]);
}

TEST_CASE("rk4 global error is fourth order") {
    const std::array<double, 2> y0{1.0, 0.0};
    const double T = 5.0;  // a whole number of steps for every h below
    double prev = 0.0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        IntegratorControl c;
        c.method = Method::rk4;
        c.h = h;
        const double e = max_error_vs_cos(integrate(kOscillator, y0, 0.0, T, c));
        if (prev > 0.0) {
            const double ratio = prev / e;
            CHECK(ratio >= 8.0);
            CHECK(ratio <= 32.0);
        }
        prev = e;
    }
}

TEST_CASE("rk45 meets its tolerances and adapts") {
    const std::array<double, 2> y0{1.0, 0.0};
    for (double rtol : {1e-6, 1e-8, 1e-10}) {
        IntegratorControl c;
        c.rtol = rtol;
        c.atol = rtol * 1e-2;
        const Solution s = integrate(kOscillator, y0, 0.0, 20.0, c);
        CAPTURE(rtol);
        CHECK(max_error_vs_cos(s) <= 1e3 * rtol);
        CHECK(s.steps > 0);
        CHECK(s.t.back() == 20.0);
    }
    IntegratorControl loose, tight;
    loose.rtol = 1e-4;
    tight.rtol = 1e-10;
    CHECK(integrate(kOscillator, y0, 0.0, 10.0, loose).steps < integrate(kOscillator, y0, 0.0, 10.0, tight).steps);
}

TEST_CASE("equilibrium stays at rest") {
    const std::array<double, 2> y0{0.0, 0.0};
    for (Method m : {Method::rk4, Method::rk45}) {
        IntegratorControl c;
        c.method = m;
        c.h = 1e-2;
        const Solution s = integrate(kOscillator, y0, 0.0, 3.0, c);
        for (const auto& y : s.y) {
            CHECK(y[0] == 0.0);
            CHECK(y[1] == 0.0);
        }
    }
}

TEST_CASE("dense output by Hermite interpolation") {
    IntegratorControl c;
    c.dense_points = 101;
    const std::array<double, 2> y0{1.0, 0.0};
    const Solution s = integrate(kOscillator, y0, 0.0, 10.0, c);
    REQUIRE(s.t.size() == 101);
    CHECK(s.t.front() == 0.0);
    CHECK(s.t.back() == 10.0);
    CHECK(s.t[50] == doctest::Approx(5.0));
    REQUIRE(s.dy.size() == 101);
    CHECK(s.dy[10][0] == doctest::Approx(s.y[10][1]));
    // interpolation error is fourth order in the (adaptive) step
    CHECK(max_error_vs_cos(s) <= 1e-5);

    IntegratorControl raw;
    const Solution r = integrate(kOscillator, y0, 0.0, 10.0, raw);
    for (double t : {0.123, 3.3, 9.99}) CHECK(r.sample(t)[0] == doctest::Approx(std::cos(t)).epsilon(1e-5));
}

TEST_CASE("step underflow on finite-time blow-up") {
    const Rhs blow = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
    const std::array<double, 1> y0{1.0};
    CHECK_THROWS_AS(integrate(blow, y0, 0.0, 2.0, IntegratorControl{}), NumericError);
}

TEST_CASE("domain exit reports time and element") {
    const ScalarCurve c = ScalarCurve::polynomial({0.0, 1.0}, Interval{-1.0, 1.0}).with_label("MC3");
    const Rhs f = [&c](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = 1.0;
        dy[1] = c.eval(y[0]);
    };
    const std::array<double, 2> y0{0.0, 0.0};
    for (Method m : {Method::rk4, Method::rk45}) {
        IntegratorControl ctrl;
        ctrl.method = m;
        ctrl.h = 1e-2;
        try {
            (void)integrate(f, y0, 0.0, 3.0, ctrl);
            FAIL("expected DomainExitError");
        } catch (const DomainExitError& e) {
            CHECK(e.element() == "MC3");
            CHECK(e.time() >= 0.98);
            CHECK(e.time() <= 1.02);
        }
    }
}

TEST_CASE("invalid controls") {
    const std::array<double, 2> y0{1.0, 0.0};
    IntegratorControl c;
    CHECK_THROWS_AS(integrate(kOscillator, y0, 1.0, 1.0, c), Error);
    c.method = Method::rk4;
    c.h = 0.0;
    CHECK_THROWS_AS(integrate(kOscillator, y0, 0.0, 1.0, c), Error);
    c.method = Method::rk45;
    c.rtol = -1.0;
    CHECK_THROWS_AS(integrate(kOscillator, y0, 0.0, 1.0, c), Error);
    const std::array<double, 2> bad{NAN, 0.0};
    CHECK_THROWS_AS(integrate(kOscillator, bad, 0.0, 1.0, IntegratorControl{}), Error);
}
