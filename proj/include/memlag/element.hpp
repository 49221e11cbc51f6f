#pragma once

// =============================================================================
// Circuit elements and their constitutive relations
// =============================================================================

#include "memlag/curve.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memlag {

enum class ElementKind {
    resistor,
    inductor,
    capacitor,
    memristor,
    meminductor,
    memcapacitor,
    voltage_source,
    current_source,
};

/// Which electrical variable drives a memory element's constitutive curve.
///   memristor:    charge (phi = f(q))       or flux (q = f(phi))
///   meminductor:  charge (rho = f(q))       or integrated_flux (q = f(rho))
///   memcapacitor: flux (sigma = f(phi))     or integrated_charge (phi = f(sigma))
enum class Modulation { none, charge, flux, integrated_flux, integrated_charge };

struct SourceWaveform {
    enum class Shape { dc, sine };

    Shape shape = Shape::dc;
    double amplitude = 0.0;
    double omega = 0.0;  // rad/s, sine only
    double phase = 0.0;  // rad, sine only

    static SourceWaveform dc(double amplitude);
    static SourceWaveform sine(double amplitude, double omega, double phase = 0.0);

    [[nodiscard]] double value(double t) const;
    [[nodiscard]] double rate(double t) const;
    /// Closed-form integral from 0 to t (the source is switched on at t = 0).
    [[nodiscard]] double integral(double t) const;
    /// Closed-form double integral from 0 to t.
    [[nodiscard]] double double_integral(double t) const;

    bool operator==(const SourceWaveform&) const = default;
};

/// Signed coordinate membership; `coord` is 1-based.
struct Membership {
    int coord = 0;
    int sign = 1;
    bool operator==(const Membership&) const = default;
};

struct Element {
    std::string name;
    ElementKind kind = ElementKind::resistor;
    Modulation modulation = Modulation::none;
    double value = 0.0;                   // R, L or C for conventional kinds
    std::optional<ScalarCurve> curve;     // memory kinds
    std::optional<SourceWaveform> source; // sources
    std::vector<Membership> members;
    int line = 0;                         // source line in the netlist, 0 if built in code

    [[nodiscard]] bool is_memory() const noexcept;
    [[nodiscard]] bool is_source() const noexcept;
    [[nodiscard]] bool is_conventional() const noexcept;

    /// Field equality; the source line is not compared.
    bool operator==(const Element& other) const;
};

Element make_linear(std::string name, ElementKind kind, double value, std::vector<Membership> members = {});
Element make_memory(std::string name, ElementKind kind, Modulation modulation, ScalarCurve curve,
                    std::vector<Membership> members = {});
Element make_source(std::string name, ElementKind kind, SourceWaveform source, std::vector<Membership> members = {});

[[nodiscard]] bool modulation_allowed(ElementKind kind, Modulation modulation) noexcept;

/// Incremental memristance/memductance/meminductance/memcapacitance at the
/// given state; the linear parameter for conventional kinds.
[[nodiscard]] double incremental_value(const Element& element, double state);

/// F(x) + F*(f(x)) - x f(x), where F integrates the curve and F* integrates
/// its inverse. Vanishes identically for an invertible curve through the origin.
[[nodiscard]] double legendre_residual(const ScalarCurve& curve, double x);

[[nodiscard]] std::string_view kind_token(ElementKind kind) noexcept;
[[nodiscard]] std::string_view modulation_token(Modulation modulation) noexcept;
[[nodiscard]] std::string_view kind_name(ElementKind kind) noexcept;

} // namespace memlag
