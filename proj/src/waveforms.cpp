#include "memlag/sim.hpp"

#include "memlag/format.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace memlag {

namespace {

using Series = std::vector<double>;

// Fornberg weights for the first derivative at x0 over nodes z.
template <std::size_t N>
std::array<double, N> fornberg_d1(const std::array<double, N>& z, double x0) {
    std::array<std::array<double, 2>, N> c{};
    double c1 = 1.0, c4 = z[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        const std::size_t mn = std::min<std::size_t>(i, 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = z[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k)
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, N> w{};
    for (std::size_t i = 0; i < N; ++i) w[i] = c[i][1];
    return w;
}

Series branch_series(const Matrix& m, const std::vector<Membership>& members) {
    Series out(static_cast<std::size_t>(m.rows()), 0.0);
    for (const Membership& mb : members) {
        const auto col = static_cast<Eigen::Index>(mb.coord - 1);
        for (Eigen::Index k = 0; k < m.rows(); ++k) out[static_cast<std::size_t>(k)] += mb.sign * m(k, col);
    }
    return out;
}

Series scaled(const Series& s, double c) {
    Series out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [c](double v) { return c * v; });
    return out;
}

Series divided(const Series& s, double c) {
    Series out(s.size());
    std::transform(s.begin(), s.end(), out.begin(), [c](double v) { return v / c; });
    return out;
}

Series product(const Series& a, const Series& b) {
    Series out(a.size());
    std::transform(a.begin(), a.end(), b.begin(), out.begin(), std::multiplies<>());
    return out;
}

Series curve_eval(const ScalarCurve& c, const Series& xs) {
    Series out(xs.size());
    c.eval_batch(xs, out);
    return out;
}

Series curve_deriv(const ScalarCurve& c, const Series& xs) {
    Series out(xs.size());
    c.deriv_batch(xs, out);
    return out;
}

Series curve_deriv2(const ScalarCurve& c, const Series& xs) {
    Series out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [&c](double x) { return c.deriv2(x); });
    return out;
}

Series sampled(const std::vector<double>& t, auto&& fn) {
    Series out(t.size());
    std::transform(t.begin(), t.end(), out.begin(), fn);
    return out;
}

void loop_element(const Element& e, const std::vector<double>& t, const Series& s, ElementSeries& out) {
    out.sigma = s;
    switch (e.kind) {
    case ElementKind::resistor:
        out.phi = scaled(out.q, e.value);
        out.V = scaled(out.I, e.value);
        break;
    case ElementKind::inductor:
        out.phi = scaled(out.I, e.value);
        out.rho = scaled(out.q, e.value);
        out.V = grid_derivative(t, out.phi);
        break;
    case ElementKind::capacitor:
        out.phi = divided(s, e.value);
        out.V = divided(out.q, e.value);
        break;
    case ElementKind::memristor:
        out.phi = curve_eval(*e.curve, out.q);
        out.V = product(curve_deriv(*e.curve, out.q), out.I);
        break;
    case ElementKind::meminductor:
        out.rho = curve_eval(*e.curve, out.q);
        out.phi = product(curve_deriv(*e.curve, out.q), out.I);
        out.V = grid_derivative(t, out.phi);
        break;
    case ElementKind::memcapacitor:
        out.phi = curve_eval(*e.curve, s);
        out.V = product(curve_deriv(*e.curve, s), out.q);
        break;
    case ElementKind::voltage_source: {
        const SourceWaveform& w = *e.source;
        out.phi = sampled(t, [&w](double tt) { return w.integral(tt); });
        out.V = sampled(t, [&w](double tt) { return w.value(tt); });
        out.rho = sampled(t, [&w](double tt) { return w.double_integral(tt); });
        break;
    }
    case ElementKind::current_source:
        throw FormulationError("element " + e.name + ": current source in a loop-analysis circuit");
    }
}

void node_element(const Element& e, const std::vector<double>& t, const Series& s, ElementSeries& out) {
    out.rho = s;
    switch (e.kind) {
    case ElementKind::resistor:
        out.q = divided(out.phi, e.value);
        out.I = divided(out.V, e.value);
        break;
    case ElementKind::capacitor:
        out.q = scaled(out.V, e.value);
        out.sigma = scaled(out.phi, e.value);
        out.I = grid_derivative(t, out.q);
        break;
    case ElementKind::inductor:
        out.q = divided(s, e.value);
        out.I = divided(out.phi, e.value);
        break;
    case ElementKind::memristor:
        out.q = curve_eval(*e.curve, out.phi);
        out.I = product(curve_deriv(*e.curve, out.phi), out.V);
        break;
    case ElementKind::meminductor:
        out.q = curve_eval(*e.curve, s);
        out.I = product(curve_deriv(*e.curve, s), out.phi);
        break;
    case ElementKind::memcapacitor:
        out.sigma = curve_eval(*e.curve, out.phi);
        out.q = product(curve_deriv(*e.curve, out.phi), out.V);
        out.I = grid_derivative(t, out.q);
        break;
    case ElementKind::current_source: {
        const SourceWaveform& w = *e.source;
        out.q = sampled(t, [&w](double tt) { return w.integral(tt); });
        out.I = sampled(t, [&w](double tt) { return w.value(tt); });
        out.sigma = sampled(t, [&w](double tt) { return w.double_integral(tt); });
        break;
    }
    case ElementKind::voltage_source:
        throw FormulationError("element " + e.name + ": voltage source in a node-analysis circuit");
    }
}

} // namespace

const ElementSeries& ElementWaveforms::at(std::string_view name) const {
    for (const ElementSeries& s : elements)
        if (s.name == name) return s;
    throw Error("no waveforms for element '" + std::string(name) + "'");
}

std::vector<double> grid_derivative(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw Error("grid and series lengths differ");
    const std::size_t n = t.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    if (n < 5) {
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t a = k == 0 ? 0 : k - 1;
            const std::size_t b = k + 1 == n ? k : k + 1;
            out[k] = (y[b] - y[a]) / (t[b] - t[a]);
        }
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t start = std::clamp<std::size_t>(k < 2 ? 0 : k - 2, 0, n - 5);
        std::array<double, 5> z{};
        for (std::size_t i = 0; i < 5; ++i) z[i] = t[start + i];
        const auto w = fornberg_d1(z, t[k]);
        double acc = 0.0;
        for (std::size_t i = 0; i < 5; ++i) acc += w[i] * y[start + i];
        out[k] = acc;
    }
    return out;
}

ElementWaveforms branch_waveforms(const Circuit& circuit, const Trajectory& traj) {
    if (traj.formulation != circuit.formulation)
        throw Error("trajectory formulation does not match circuit '" + circuit.name + "'");
    if (traj.coords() != static_cast<std::size_t>(circuit.n_coords) ||
        static_cast<std::size_t>(traj.x.rows()) != traj.points())
        throw Error("trajectory has " + std::to_string(traj.coords()) + " coordinates, circuit '" + circuit.name +
                    "' has " + std::to_string(circuit.n_coords));

    ElementWaveforms out;
    out.formulation = circuit.formulation;
    out.t = traj.t;
    for (const Element& e : circuit.elements) {
        ElementSeries s;
        s.name = e.name;
        s.kind = e.kind;
        s.modulation = e.modulation;
        const Series x = branch_series(traj.x, e.members);
        if (circuit.formulation == Formulation::loop) {
            s.q = branch_series(traj.v, e.members);
            s.I = branch_series(traj.a, e.members);
            loop_element(e, out.t, x, s);
        } else {
            s.phi = branch_series(traj.v, e.members);
            s.V = branch_series(traj.a, e.members);
            node_element(e, out.t, x, s);
        }
        out.elements.push_back(std::move(s));
    }
    return out;
}

bool current_driven(const Element& e) {
    switch (e.kind) {
    case ElementKind::resistor:
    case ElementKind::inductor: return true;
    case ElementKind::capacitor: return false;
    case ElementKind::memristor:
    case ElementKind::meminductor: return e.modulation == Modulation::charge;
    case ElementKind::memcapacitor: return e.modulation == Modulation::integrated_charge;
    case ElementKind::voltage_source:
    case ElementKind::current_source: break;
    }
    throw Error("element " + e.name + ": sources cannot be driven");
}

ElementWaveforms drive_element(const Element& e, const SourceWaveform& drive, double t0, double t1,
                               const IntegratorControl& ctrl) {
    const bool by_current = current_driven(e);

    // y = [first integral of the drive, second integral], both zero at t0
    const Rhs f = [&drive](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = drive.value(t);
        dy[1] = y[0];
    };
    const std::array<double, 2> y0{0.0, 0.0};
    const Solution sol = integrate(f, y0, t0, t1, ctrl);

    ElementWaveforms out;
    out.t = sol.t;
    const std::vector<double>& t = out.t;
    Series m1(t.size()), m2(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        m1[k] = sol.y[k][0];
        m2[k] = sol.y[k][1];
    }
    const Series u = sampled(t, [&drive](double tt) { return drive.value(tt); });
    const Series du = sampled(t, [&drive](double tt) { return drive.rate(tt); });

    ElementSeries s;
    s.name = e.name;
    s.kind = e.kind;
    s.modulation = e.modulation;
    if (e.curve) {
        // the modulating state is the curve argument
        const Series* state = nullptr;
        switch (e.modulation) {
        case Modulation::charge:
        case Modulation::flux: state = &m1; break;
        case Modulation::integrated_charge:
        case Modulation::integrated_flux: state = &m2; break;
        case Modulation::none: break;
        }
        if (state) {
            for (std::size_t k = 0; k < t.size(); ++k)
                if (!e.curve->domain().contains((*state)[k]))
                    throw DomainExitError(t[k], e.name,
                                          "state left the domain of element '" + e.name + "' at t = " +
                                              format_real(t[k]));
        }
    }
        if (by_current) {
            out.formulation = Formulation::loop;
            s.I = u;
            s.q = m1;
            s.sigma = m2;
            switch (e.kind) {
            case ElementKind::resistor:
                s.phi = scaled(s.q, e.value);
                s.V = scaled(s.I, e.value);
                break;
            case ElementKind::inductor:
                s.phi = scaled(s.I, e.value);
                s.V = scaled(du, e.value);
                s.rho = scaled(s.q, e.value);
                break;
            case ElementKind::memristor:
                s.phi = curve_eval(*e.curve, s.q);
                s.V = product(curve_deriv(*e.curve, s.q), s.I);
                break;
            case ElementKind::meminductor: {
                s.rho = curve_eval(*e.curve, s.q);
                const Series d1 = curve_deriv(*e.curve, s.q);
                const Series d2 = curve_deriv2(*e.curve, s.q);
                s.phi = product(d1, s.I);
                s.V.resize(t.size());
                for (std::size_t k = 0; k < t.size(); ++k) s.V[k] = d2[k] * s.I[k] * s.I[k] + d1[k] * du[k];
                break;
            }
            case ElementKind::memcapacitor:
                s.phi = curve_eval(*e.curve, s.sigma);
                s.V = product(curve_deriv(*e.curve, s.sigma), s.q);
                break;
            default: break;
            }
        } else {
            out.formulation = Formulation::node;
            s.V = u;
            s.phi = m1;
            s.rho = m2;
            switch (e.kind) {
            case ElementKind::capacitor:
                s.q = scaled(s.V, e.value);
                s.I = scaled(du, e.value);
                s.sigma = scaled(s.phi, e.value);
                break;
            case ElementKind::memristor:
                s.q = curve_eval(*e.curve, s.phi);
                s.I = product(curve_deriv(*e.curve, s.phi), s.V);
                break;
            case ElementKind::meminductor:
                s.q = curve_eval(*e.curve, s.rho);
                s.I = product(curve_deriv(*e.curve, s.rho), s.phi);
                break;
            case ElementKind::memcapacitor: {
                s.sigma = curve_eval(*e.curve, s.phi);
                const Series d1 = curve_deriv(*e.curve, s.phi);
                const Series d2 = curve_deriv2(*e.curve, s.phi);
                s.q = product(d1, s.V);
                s.I.resize(t.size());
                for (std::size_t k = 0; k < t.size(); ++k) s.I[k] = d2[k] * s.V[k] * s.V[k] + d1[k] * du[k];
                break;
            }
            default: break;
            }
        }
    out.elements.push_back(std::move(s));
    return out;
}

} // namespace memlag
