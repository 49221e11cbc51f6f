#pragma once

// Random curves and circuits for property tests. Every generated circuit
// passes validation and has an inertial element on every coordinate.

#include "memlag/netlist.hpp"
#include "memlag/linalg.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace memlag::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// c1 x + c2 x^2 + c3 x^3 with c2^2 < 3 c1 c3, so the slope never vanishes.
inline ScalarCurve random_cubic(Rng& rng) {
    const double c1 = uniform(rng, 0.5, 2.0);
    const double c3 = uniform(rng, 0.05, 1.0);
    const double c2 = 0.9 * uniform(rng, -1.0, 1.0) * std::sqrt(3.0 * c1 * c3);
    return ScalarCurve::polynomial({0.0, c1, c2, c3});
}

/// Increasing piecewise-linear curve through the origin, hull at least [-3, 3].
inline ScalarCurve random_pwl(Rng& rng) {
    std::vector<ScalarCurve::Point> pts{{0.0, 0.0}};
    const int left = uniform_int(rng, 1, 3), right = uniform_int(rng, 1, 3);
    double x = 0.0, y = 0.0;
    for (int i = 0; i < left; ++i) {
        const double dx = i + 1 == left ? std::max(3.0 + x, 0.1) + uniform(rng, 0.0, 1.0) : uniform(rng, 0.3, 1.0);
        x -= dx;
        y -= dx * uniform(rng, 0.2, 3.0);
        pts.insert(pts.begin(), {x, y});
    }
    x = 0.0;
    y = 0.0;
    for (int i = 0; i < right; ++i) {
        const double dx = i + 1 == right ? std::max(3.0 - x, 0.1) + uniform(rng, 0.0, 1.0) : uniform(rng, 0.3, 1.0);
        x += dx;
        y += dx * uniform(rng, 0.2, 3.0);
        pts.push_back({x, y});
    }
    return ScalarCurve::piecewise_linear(pts);
}

inline ScalarCurve random_curve(Rng& rng) { return uniform_int(rng, 0, 2) == 0 ? random_pwl(rng) : random_cubic(rng); }

inline std::vector<Membership> random_members(Rng& rng, int n_coords, int home) {
    std::vector<Membership> m{{home, uniform_int(rng, 0, 3) == 0 ? -1 : 1}};
    if (n_coords > 1 && uniform_int(rng, 0, 2) == 0) {
        int other = uniform_int(rng, 1, n_coords - 1);
        if (other >= home) ++other;
        m.push_back({other, uniform_int(rng, 0, 1) ? 1 : -1});
    }
    return m;
}

inline SourceWaveform random_waveform(Rng& rng) {
    if (uniform_int(rng, 0, 1) == 0) return SourceWaveform::dc(uniform(rng, -2.0, 2.0));
    return SourceWaveform::sine(uniform(rng, 0.1, 2.0), uniform(rng, 0.5, 3.0), uniform(rng, -1.0, 1.0));
}

/// Random well-posed circuit with 1..max_coords coordinates.
inline Circuit random_circuit(Rng& rng, Formulation f, int max_coords = 3) {
    Circuit c;
    c.formulation = f;
    c.n_coords = uniform_int(rng, 1, max_coords);
    c.name = "rand" + std::to_string(rng() % 100000);
    const bool loop = f == Formulation::loop;
    int id = 0;
    auto name = [&](const char* prefix) { return std::string(prefix) + std::to_string(++id); };

    for (int k = 1; k <= c.n_coords; ++k) {
        // inertial element on every coordinate (own branch)
        if (uniform_int(rng, 0, 1) == 0) {
            c.elements.push_back(make_linear(name(loop ? "L" : "C"), loop ? ElementKind::inductor : ElementKind::capacitor,
                                             uniform(rng, 0.5, 2.0), {{k, 1}}));
        } else {
            c.elements.push_back(make_memory(name(loop ? "LM" : "CM"), loop ? ElementKind::meminductor : ElementKind::memcapacitor,
                                             loop ? Modulation::charge : Modulation::flux, random_curve(rng), {{k, 1}}));
        }
        // potential element
        switch (uniform_int(rng, 0, 2)) {
        case 0:
            c.elements.push_back(make_linear(name(loop ? "C" : "L"), loop ? ElementKind::capacitor : ElementKind::inductor,
                                             uniform(rng, 0.5, 2.0), random_members(rng, c.n_coords, k)));
            break;
        case 1:
            c.elements.push_back(make_memory(name(loop ? "CM" : "LM"), loop ? ElementKind::memcapacitor : ElementKind::meminductor,
                                             loop ? Modulation::integrated_charge : Modulation::integrated_flux,
                                             random_curve(rng), random_members(rng, c.n_coords, k)));
            break;
        default: break;
        }
        // dissipative element
        switch (uniform_int(rng, 0, 2)) {
        case 0:
            c.elements.push_back(make_linear(name("R"), ElementKind::resistor, uniform(rng, 0.1, 2.0),
                                             random_members(rng, c.n_coords, k)));
            break;
        case 1:
            c.elements.push_back(make_memory(name("RM"), ElementKind::memristor, loop ? Modulation::charge : Modulation::flux,
                                             random_curve(rng), random_members(rng, c.n_coords, k)));
            break;
        default: break;
        }
    }
    if (uniform_int(rng, 0, 1) == 0) {
        c.elements.push_back(make_source(name(loop ? "VS" : "IS"), loop ? ElementKind::voltage_source : ElementKind::current_source,
                                         random_waveform(rng), random_members(rng, c.n_coords, uniform_int(rng, 1, c.n_coords))));
    }
    return c;
}

/// Conservative variant: no dissipative elements.
inline Circuit random_conservative_circuit(Rng& rng, Formulation f, int max_coords = 3) {
    Circuit c = random_circuit(rng, f, max_coords);
    std::erase_if(c.elements, [](const Element& e) { return e.kind == ElementKind::resistor || e.kind == ElementKind::memristor; });
    return c;
}

inline Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = uniform(rng, lo, hi);
    return v;
}

} // namespace memlag::testing
