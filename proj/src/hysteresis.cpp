#include "memlag/kernels.hpp"
#include "memlag/sim.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace memlag {

namespace {

// max |f'| over the states visited on the grid and a uniform sweep of their hull
double max_incremental(const ScalarCurve& c, const std::vector<double>& states) {
    if (states.empty()) return 0.0;
    std::vector<double> d(states.size());
    c.deriv_batch(states, d);
    double k = kernels::max_abs(d);
    const auto [lo, hi] = std::minmax_element(states.begin(), states.end());
    constexpr int sweep = 1024;
    for (int i = 0; i <= sweep; ++i) {
        const double x = *lo + (*hi - *lo) * i / sweep;
        k = std::max(k, std::fabs(c.deriv(x)));
    }
    for (const auto& p : c.points())
        if (p.x >= *lo && p.x <= *hi) k = std::max(k, std::fabs(c.deriv(p.x)));
    return k;
}

} // namespace

HysteresisPair hysteresis_pair(const Element& e, const ElementSeries& s) {
    HysteresisPair p;
    auto set = [&p](const std::vector<double>& u, const char* un, const std::vector<double>& y, const char* yn) {
        p.u = u;
        p.y = y;
        p.u_name = un;
        p.y_name = yn;
    };
    switch (e.kind) {
    case ElementKind::resistor:
        set(s.I, "I", s.V, "V");
        p.K = std::fabs(e.value);
        break;
    case ElementKind::inductor:
        set(s.I, "I", s.phi, "phi");
        p.K = std::fabs(e.value);
        break;
    case ElementKind::capacitor:
        set(s.I, "I", s.q, "q");
        p.K = std::fabs(e.value);
        break;
    case ElementKind::memristor:
        if (e.modulation == Modulation::charge) {
            set(s.I, "I", s.V, "V");
            p.K = max_incremental(*e.curve, s.q);
        } else {
            set(s.V, "V", s.I, "I");
            p.K = max_incremental(*e.curve, s.phi);
        }
        break;
    case ElementKind::meminductor:
        if (e.modulation == Modulation::charge) {
            set(s.I, "I", s.phi, "phi");
            p.K = max_incremental(*e.curve, s.q);
        } else {
            set(s.phi, "phi", s.I, "I");
            p.K = max_incremental(*e.curve, s.rho);
        }
        break;
    case ElementKind::memcapacitor:
        if (e.modulation == Modulation::flux) {
            set(s.V, "V", s.q, "q");
            p.K = max_incremental(*e.curve, s.phi);
        } else {
            set(s.q, "q", s.V, "V");
            p.K = max_incremental(*e.curve, s.sigma);
        }
        break;
    case ElementKind::voltage_source:
    case ElementKind::current_source:
        throw Error("element " + e.name + ": sources have no hysteresis pair");
    }
    if (p.u.size() != p.y.size()) throw Error("element " + e.name + ": waveform series are incomplete");
    return p;
}

PinchReport pinch_check(std::span<const double> u, std::span<const double> y, double eps, double K) {
    if (u.size() != y.size())
        throw Error("series lengths differ (" + std::to_string(u.size()) + " vs " + std::to_string(y.size()) + ")");
    if (!(eps > 0.0)) throw Error("pinch threshold must be positive");
    if (!(K >= 0.0) || !std::isfinite(K)) throw Error("pinch bound must be finite and non-negative");

    PinchReport r;
    r.eps = eps;
    r.K = K;
    const kernels::GatedMax g = kernels::gated_max_abs(u, y, eps);
    r.gated_points = g.count;
    r.max_gated_output = g.max_abs;
    // one rounding of y = f'(s) * u may push |y| a few ulps past K * eps
    r.pinched = g.max_abs <= K * eps * (1.0 + 4.0 * DBL_EPSILON);
    const kernels::HalfPlaneAreas a = kernels::shoelace_half_planes(u, y);
    r.area_positive = std::fabs(a.positive);
    r.area_negative = std::fabs(a.negative);
    return r;
}

} // namespace memlag
