#include <doctest.h>

#include "memlag/lagrangian.hpp"
#include "memlag/report_io.hpp"
#include "memlag/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

using namespace memlag;

namespace {

Circuit load(const std::string& name) {
    std::ifstream in(std::string(MEMLAG_NETLIST_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

Trajectory run(const Circuit& c, const Vector& x0, const Vector& v0, double t1, std::size_t points = 0,
               double h_max = INFINITY) {
    IntegratorControl ctrl;
    ctrl.h_max = h_max;
    ctrl.rtol = 1e-10;
    ctrl.atol = 1e-12;
    ctrl.dense_points = points;
    return simulate(to_first_order(build_system(c)), x0, v0, 0.0, t1, ctrl);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b, std::size_t skip = 0) {
    REQUIRE(a.size() == b.size());
    double m = 0.0;
    for (std::size_t k = skip; k + skip < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
    return m;
}

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

IntegratorControl dense(std::size_t points) {
    IntegratorControl c;
    c.rtol = 1e-11;
    c.atol = 1e-13;
    c.dense_points = points;
    return c;
}

} // namespace

TEST_CASE("linear meminductor under constant current") {
    const Element e = make_memory("LM", ElementKind::meminductor, Modulation::charge, ScalarCurve::linear(0.5));
    const ElementWaveforms w = drive_element(e, SourceWaveform::dc(2.0), 0.0, 1.0, dense(101));
    const ElementSeries& s = w.elements.front();
    for (std::size_t k = 0; k < w.t.size(); ++k) {
        CHECK(s.I[k] == doctest::Approx(2.0));
        CHECK(s.q[k] == doctest::Approx(2.0 * w.t[k]).epsilon(1e-9));
        CHECK(s.phi[k] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(s.rho[k] == doctest::Approx(w.t[k]).epsilon(1e-9));
    }
}

TEST_CASE("cubic memristor under sinusoidal current") {
    const Element e = make_memory("RM", ElementKind::memristor, Modulation::charge,
                                  ScalarCurve::polynomial({0.0, 1.0, 0.0, 1.0 / 3.0}));
    // raw integrator nodes; dense output adds the cubic interpolation error
    const ElementWaveforms w = drive_element(e, SourceWaveform::sine(1.0, 1.0), 0.0, 4.0 * M_PI, dense(0));
    const ElementSeries& s = w.elements.front();
    double err = 0.0;
    for (std::size_t k = 0; k < w.t.size(); ++k) {
        const double t = w.t[k];
        const double q = 1.0 - std::cos(t);
        err = std::max(err, std::fabs(s.V[k] - (1.0 + q * q) * std::sin(t)));
        CHECK(std::fabs(s.q[k] - q) <= 1e-10);
    }
    CHECK(err <= 1e-8);
}

TEST_CASE("memcapacitor at zero integrated charge holds no flux") {
    Circuit c;
    c.name = "mc";
    c.formulation = Formulation::loop;
    c.n_coords = 1;
    c.elements = {make_linear("L1", ElementKind::inductor, 1.0, {{1, 1}}),
                  make_memory("CM", ElementKind::memcapacitor, Modulation::integrated_charge,
                              ScalarCurve::polynomial({0.0, 2.0, 0.0, 0.5}), {{1, 1}})};
    const Trajectory tr = run(c, Vector::Zero(1), Vector::Zero(1), 1.0, 11);
    const ElementWaveforms w = branch_waveforms(c, tr);
    for (double v : w.at("CM").phi) CHECK(v == 0.0);
    for (double v : w.at("CM").V) CHECK(v == 0.0);
    CHECK_THROWS_AS((void)w.at("nope"), Error);
}

TEST_CASE("linear memory elements match their conventional counterparts") {
    const SourceWaveform drive = SourceWaveform::sine(0.7, 1.3);
    const auto compare = [&](const Element& mem, const Element& conv) {
        REQUIRE(current_driven(mem) == current_driven(conv));
        const ElementSeries a = drive_element(mem, drive, 0.0, 10.0, dense(1001)).elements.front();
        const ElementSeries b = drive_element(conv, drive, 0.0, 10.0, dense(1001)).elements.front();
        CHECK(max_abs_diff(a.q, b.q) <= 1e-9);
        CHECK(max_abs_diff(a.I, b.I) <= 1e-9);
        CHECK(max_abs_diff(a.phi, b.phi) <= 1e-9);
        CHECK(max_abs_diff(a.V, b.V, 3) <= 1e-7);
    };
    compare(make_memory("M", ElementKind::memristor, Modulation::charge, ScalarCurve::linear(2.0)),
            make_linear("R", ElementKind::resistor, 2.0));
    compare(make_memory("M", ElementKind::meminductor, Modulation::charge, ScalarCurve::linear(0.3)),
            make_linear("L", ElementKind::inductor, 0.3));
    compare(make_memory("M", ElementKind::memcapacitor, Modulation::flux, ScalarCurve::linear(4.0)),
            make_linear("C", ElementKind::capacitor, 4.0));
}

TEST_CASE("zero drive gives zero response") {
    for (const Element& e :
         {make_memory("M", ElementKind::memristor, Modulation::charge, ScalarCurve::polynomial({0.0, 1.0, 0.0, 1.0})),
          make_memory("M", ElementKind::meminductor, Modulation::integrated_flux, ScalarCurve::linear(1.0)),
          make_linear("C", ElementKind::capacitor, 1.0)}) {
        const ElementSeries s = drive_element(e, SourceWaveform::dc(0.0), 0.0, 1.0, dense(21)).elements.front();
        CHECK(max_abs(s.q) == 0.0);
        CHECK(max_abs(s.I) == 0.0);
        CHECK(max_abs(s.phi) == 0.0);
        CHECK(max_abs(s.V) == 0.0);
    }
}

TEST_CASE("branch waveforms are consistent with time derivatives") {
    const auto check = [](const Circuit& c, const Vector& x0, const Vector& v0) {
        const Trajectory tr = run(c, x0, v0, 10.0, 4001);
        const ElementWaveforms w = branch_waveforms(c, tr);
        REQUIRE(w.elements.size() == c.elements.size());
        for (const ElementSeries& s : w.elements) {
            CAPTURE(s.name);
            const double scale = 1.0 + max_abs(s.V) + max_abs(s.I);
            CHECK(max_abs_diff(grid_derivative(w.t, s.phi), s.V, 4) <= 1e-6 * scale);
            CHECK(max_abs_diff(grid_derivative(w.t, s.q), s.I, 4) <= 1e-6 * scale);
            if (!s.sigma.empty()) CHECK(max_abs_diff(grid_derivative(w.t, s.sigma), s.q, 4) <= 1e-6 * scale);
            if (!s.rho.empty()) CHECK(max_abs_diff(grid_derivative(w.t, s.rho), s.phi, 4) <= 1e-6 * scale);
        }
    };
    Vector x0(2), v0(2);
    x0 << 0.5, 0.0;
    v0 << 0.2, 0.0;
    check(load("two_loop.net"), x0, v0);
    check(load("two_loop_driven.net"), Vector::Zero(2), Vector::Zero(2));
    x0 << 0.3, -0.2;
    v0 << 0.1, 0.0;
    check(load("node_dual.net"), x0, v0);
}

TEST_CASE("two_loop obeys its loop equations") {
    // loop 1: L1 I1 + (q1 + q1^3/3) + 2 (sigma1 - sigma2) = 0
    // loop 2: -2 (sigma1 - sigma2) + 0.5 q2 = 0
    const Circuit c = load("two_loop.net");
    Vector x0(2), v0(2);
    x0 << 0.8, 0.1;
    v0 << -0.3, 0.0;
    const std::size_t N = 8001;  // central differences, O(h^2)
    const Trajectory tr = run(c, x0, v0, 20.0, N, 1e-3);
    const double h = tr.t[1] - tr.t[0];
    double r1 = 0.0, r2 = 0.0, rq = 0.0;
    for (std::size_t k = 1; k + 1 < N; ++k) {
        const auto K = static_cast<Eigen::Index>(k);
        const double q1 = tr.v(K, 0), q2 = tr.v(K, 1);
        const double s1 = tr.x(K, 0), s2 = tr.x(K, 1);
        const double I1 = (tr.v(K + 1, 0) - tr.v(K - 1, 0)) / (2.0 * h);
        r1 = std::max(r1, std::fabs(I1 + q1 + q1 * q1 * q1 / 3.0 + 2.0 * (s1 - s2)));
        r2 = std::max(r2, std::fabs(-2.0 * (s1 - s2) + 0.5 * q2));
        rq = std::max(rq, std::fabs((tr.x(K + 1, 0) - tr.x(K - 1, 0)) / (2.0 * h) - q1));
    }
    CHECK(r1 <= 1e-4);
    CHECK(r2 <= 1e-8);
    CHECK(rq <= 1e-4);
    CHECK(ikvl_residual(build_system(c), tr) <= 1e-6);
}

TEST_CASE("two_loop stored energy does not increase") {
    const Circuit c = load("two_loop.net");
    const LagrangianSystem sys = build_system(c);
    Vector x0(2), v0(2);
    x0 << 1.0, -0.5;
    v0 << 0.7, 0.0;
    const Trajectory tr = run(c, x0, v0, 20.0, 2001);
    double prev = INFINITY;
    for (std::size_t k = 0; k < tr.points(); ++k) {
        const auto K = static_cast<Eigen::Index>(k);
        const auto e = sys.stored(tr.x.row(K).transpose(), tr.v.row(K).transpose());
        const double E = e.kinetic + e.potential;
        REQUIRE(E <= prev + 1e-9);
        prev = E;
    }
    CHECK(prev < 0.5);
}

TEST_CASE("iKVL residual detects a corrupted trajectory") {
    const Circuit c = load("lc.net");
    const LagrangianSystem sys = build_system(c);
    Trajectory tr;
    const std::size_t N = 629;
    tr.t.resize(N);
    tr.x.resize(N, 1);
    tr.v.resize(N, 1);
    tr.a.resize(N, 1);
    for (std::size_t k = 0; k < N; ++k) {
        const double t = 0.01 * static_cast<double>(k);
        const auto K = static_cast<Eigen::Index>(k);
        tr.t[k] = t;
        tr.x(K, 0) = std::cos(t);
        tr.v(K, 0) = -std::sin(t);
        tr.a(K, 0) = -std::cos(t);
    }
    CHECK(ikvl_residual(sys, tr) <= 1e-15);
    tr.x *= 2.0;
    CHECK(ikvl_residual(sys, tr) == doctest::Approx(1.0).epsilon(1e-6));

    const Trajectory rest = run(c, Vector::Zero(1), Vector::Zero(1), 5.0);
    CHECK(ikvl_residual(sys, rest) == 0.0);
    CHECK(max_abs({rest.x.data(), static_cast<std::size_t>(rest.x.size())}) == 0.0);
}

TEST_CASE("shipped examples satisfy the loop and node equations") {
    for (const char* name : {"meminductor_lc.net", "two_loop.net", "two_loop_driven.net", "lc.net", "rlc.net", "node_dual.net",
                             "memristor.net"}) {
        CAPTURE(name);
        const Circuit c = load(name);
        const LagrangianSystem sys = build_system(c);
        const auto n = static_cast<Eigen::Index>(c.n_coords);
        const Vector x0 = Vector::Constant(n, 0.2);
        const Vector v0 = Vector::Constant(n, 0.1);
        IntegratorControl ctrl;
        const Trajectory tr = simulate(to_first_order(sys), x0, v0, 0.0, 10.0, ctrl);
        CHECK(ikvl_residual(sys, tr) <= 100.0 * ctrl.rtol);
    }
}

TEST_CASE("pinch check on resistor and capacitor") {
    const SourceWaveform drive = SourceWaveform::sine(1.0, 1.0);
    const double T = 4.0 * M_PI;
    {
        const Element r = make_linear("R", ElementKind::resistor, 3.0);
        const ElementSeries s = drive_element(r, drive, 0.0, T, dense(4001)).elements.front();
        const HysteresisPair p = hysteresis_pair(r, s);
        CHECK(p.K == doctest::Approx(3.0));
        const PinchReport rep = pinch_check(p.u, p.y, 1e-2, p.K);
        CHECK(rep.pinched);
        CHECK(rep.gated_points > 0);
        CHECK(rep.area_positive <= 1e-9);
        CHECK(rep.area_negative <= 1e-9);
    }
    {
        const Element cap = make_linear("C", ElementKind::capacitor, 1.0);
        const ElementSeries s = drive_element(cap, drive, 0.0, T, dense(4001)).elements.front();
        const HysteresisPair p = hysteresis_pair(cap, s);
        CHECK_FALSE(pinch_check(p.u, p.y, 1e-2, p.K).pinched);
    }
}

TEST_CASE("pinch verdict is scale invariant") {
    const Element m = make_memory("RM", ElementKind::memristor, Modulation::charge,
                                  ScalarCurve::polynomial({0.0, 1.0, 0.0, 1.0 / 3.0}));
    const ElementSeries s = drive_element(m, SourceWaveform::sine(1.0, 1.0), 0.0, 4.0 * M_PI, dense(4001))
                                .elements.front();
    const HysteresisPair p = hysteresis_pair(m, s);
    const PinchReport base = pinch_check(p.u, p.y, 1e-2, p.K);
    CHECK(base.pinched);
    for (double a : {1e-3, 0.5, 7.0, 1e4}) {
        for (double b : {1e-2, 3.0, 1e5}) {
            std::vector<double> u = p.u, y = p.y;
            for (double& v : u) v *= a;
            for (double& v : y) v *= b;
            const PinchReport r = pinch_check(u, y, 1e-2 * a, p.K * b / a);
            CAPTURE(a);
            CAPTURE(b);
            CHECK(r.pinched == base.pinched);
            CHECK(r.gated_points == base.gated_points);
            CHECK(r.area_positive == doctest::Approx(base.area_positive * a * b).epsilon(1e-9));
        }
    }
    const std::vector<double> shorter(p.y.begin(), p.y.end() - 1);
    CHECK_THROWS_AS(pinch_check(p.u, shorter, 1e-2, p.K), Error);
    CHECK_THROWS_AS(pinch_check(p.u, p.y, -1.0, p.K), Error);
}

TEST_CASE("grid derivative on a non-uniform grid") {
    std::vector<double> t(800), y(800), dy(800);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double s = 0.01 * static_cast<double>(k);
        t[k] = s + 0.003 * std::sin(7.0 * s);
        y[k] = std::sin(t[k]) + t[k] * t[k];
        dy[k] = std::cos(t[k]) + 2.0 * t[k];
    }
    CHECK(max_abs_diff(grid_derivative(t, y), dy) <= 1e-7);
    // exact on quartics
    for (std::size_t k = 0; k < t.size(); ++k) {
        y[k] = std::pow(t[k], 4) - t[k];
        dy[k] = 4.0 * std::pow(t[k], 3) - 1.0;
    }
    CHECK(max_abs_diff(grid_derivative(t, y), dy) <= 1e-8);
    CHECK_THROWS_AS(grid_derivative(t, std::span<const double>(y).first(10)), Error);
}

TEST_CASE("trajectory CSV layout") {
    const Circuit c = load("lc.net");
    const Trajectory tr = run(c, Vector::Constant(1, 1.0), Vector::Zero(1), 1.0, 5);
    std::ostringstream os;
    write_trajectory_csv(os, tr, branch_waveforms(c, tr));
    std::istringstream in(os.str());
    std::string units, header, row;
    std::getline(in, units);
    std::getline(in, header);
    CHECK(units.rfind("# units: t=s", 0) == 0);
    CHECK(header.rfind("t,sigma1,sigma1_dot,sigma1_ddot,L1.q,L1.I,L1.phi,L1.V", 0) == 0);
    CHECK(header.find("C1.sigma") != std::string::npos);
    std::size_t rows = 0;
    while (std::getline(in, row)) {
        ++rows;
        const auto cols = std::count(row.begin(), row.end(), ',');
        CHECK(cols == std::count(header.begin(), header.end(), ','));
    }
    CHECK(rows == 5);
    // 17 significant digits round-trip exactly
    std::istringstream again(os.str());
    std::getline(again, units);
    std::getline(again, header);
    std::getline(again, row);
    std::getline(again, row);
    const std::string first = row.substr(row.find(',') + 1, row.find(',', row.find(',') + 1) - row.find(',') - 1);
    CHECK(std::stod(first) == tr.x(1, 0));
}
