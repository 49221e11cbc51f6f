#include "memlag/element.hpp"

#include "memlag/errors.hpp"
#include "memlag/format.hpp"

#include <cmath>

namespace memlag {

// =============================================================================
// SourceWaveform
// =============================================================================

SourceWaveform SourceWaveform::dc(double amplitude) {
    if (!std::isfinite(amplitude)) throw DefinitionError("source amplitude is not finite");
    return {Shape::dc, amplitude, 0.0, 0.0};
}

SourceWaveform SourceWaveform::sine(double amplitude, double omega, double phase) {
    if (!std::isfinite(amplitude) || !std::isfinite(phase)) throw DefinitionError("source parameter is not finite");
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DefinitionError("sine source needs omega > 0, got " + format_real(omega));
    return {Shape::sine, amplitude, omega, phase};
}

double SourceWaveform::value(double t) const {
    if (shape == Shape::dc) return amplitude;
    return amplitude * std::sin(omega * t + phase);
}

double SourceWaveform::rate(double t) const {
    if (shape == Shape::dc) return 0.0;
    return amplitude * omega * std::cos(omega * t + phase);
}

double SourceWaveform::integral(double t) const {
    if (shape == Shape::dc) return amplitude * t;
    return amplitude * (std::cos(phase) - std::cos(omega * t + phase)) / omega;
}

double SourceWaveform::double_integral(double t) const {
    if (shape == Shape::dc) return 0.5 * amplitude * t * t;
    return amplitude * (std::cos(phase) * t - (std::sin(omega * t + phase) - std::sin(phase)) / omega) / omega;
}

// =============================================================================
// Element
// =============================================================================

bool Element::is_memory() const noexcept {
    return kind == ElementKind::memristor || kind == ElementKind::meminductor || kind == ElementKind::memcapacitor;
}

bool Element::is_source() const noexcept {
    return kind == ElementKind::voltage_source || kind == ElementKind::current_source;
}

bool Element::is_conventional() const noexcept { return !is_memory() && !is_source(); }

bool Element::operator==(const Element& other) const {
    return name == other.name && kind == other.kind && modulation == other.modulation && value == other.value &&
           curve == other.curve && source == other.source && members == other.members;
}

bool modulation_allowed(ElementKind kind, Modulation m) noexcept {
    switch (kind) {
    case ElementKind::memristor: return m == Modulation::charge || m == Modulation::flux;
    case ElementKind::meminductor: return m == Modulation::charge || m == Modulation::integrated_flux;
    case ElementKind::memcapacitor: return m == Modulation::flux || m == Modulation::integrated_charge;
    default: return m == Modulation::none;
    }
}

Element make_linear(std::string name, ElementKind kind, double value, std::vector<Membership> members) {
    Element e;
    e.name = std::move(name);
    e.kind = kind;
    if (!e.is_conventional()) throw DefinitionError("element '" + e.name + "': not a conventional kind");
    if (!(value > 0.0) || !std::isfinite(value))
        throw DefinitionError("element '" + e.name + "': linear parameter must be strictly positive, got " +
                              format_real(value));
    e.value = value;
    e.members = std::move(members);
    return e;
}

Element make_memory(std::string name, ElementKind kind, Modulation modulation, ScalarCurve curve,
                    std::vector<Membership> members) {
    Element e;
    e.name = std::move(name);
    e.kind = kind;
    if (!e.is_memory()) throw DefinitionError("element '" + e.name + "': not a memory kind");
    if (!modulation_allowed(kind, modulation))
        throw DefinitionError("element '" + e.name + "': modulation '" + std::string(modulation_token(modulation)) +
                              "' is not defined for a " + std::string(kind_name(kind)));
    if (!curve.domain().contains(0.0))
        throw DefinitionError("element '" + e.name + "': memory curve domain must contain the origin");
    e.modulation = modulation;
    e.curve = curve.with_label(e.name);
    e.members = std::move(members);
    return e;
}

Element make_source(std::string name, ElementKind kind, SourceWaveform source, std::vector<Membership> members) {
    Element e;
    e.name = std::move(name);
    e.kind = kind;
    if (!e.is_source()) throw DefinitionError("element '" + e.name + "': not a source kind");
    e.source = source;
    e.members = std::move(members);
    return e;
}

double incremental_value(const Element& element, double state) {
    if (element.is_memory()) return element.curve->deriv(state);
    if (element.is_conventional()) return element.value;
    throw DefinitionError("element '" + element.name + "': sources have no incremental value");
}

double legendre_residual(const ScalarCurve& curve, double x) {
    const double y = curve.eval(x);
    return curve.antideriv(x) + curve.inverse_antideriv(y) - x * y;
}

std::string_view kind_token(ElementKind kind) noexcept {
    switch (kind) {
    case ElementKind::resistor: return "R";
    case ElementKind::inductor: return "L";
    case ElementKind::capacitor: return "C";
    case ElementKind::memristor: return "MR";
    case ElementKind::meminductor: return "ML";
    case ElementKind::memcapacitor: return "MC";
    case ElementKind::voltage_source: return "VSRC";
    case ElementKind::current_source: return "ISRC";
    }
    return "?";
}

std::string_view kind_name(ElementKind kind) noexcept {
    switch (kind) {
    case ElementKind::resistor: return "resistor";
    case ElementKind::inductor: return "inductor";
    case ElementKind::capacitor: return "capacitor";
    case ElementKind::memristor: return "memristor";
    case ElementKind::meminductor: return "meminductor";
    case ElementKind::memcapacitor: return "memcapacitor";
    case ElementKind::voltage_source: return "voltage source";
    case ElementKind::current_source: return "current source";
    }
    return "?";
}

std::string_view modulation_token(Modulation m) noexcept {
    switch (m) {
    case Modulation::none: return "none";
    case Modulation::charge: return "q";
    case Modulation::flux: return "phi";
    case Modulation::integrated_flux: return "rho";
    case Modulation::integrated_charge: return "sigma";
    }
    return "?";
}

} // namespace memlag
