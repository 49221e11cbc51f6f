#pragma once

// =============================================================================
// Time-domain simulation, branch waveform reconstruction, hysteresis checks
// =============================================================================

#include "memlag/first_order.hpp"
#include "memlag/integrate.hpp"
#include "memlag/netlist.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memlag {

struct Trajectory {
    Formulation formulation = Formulation::loop;
    std::vector<double> t;
    Matrix x;  // rows: grid points, columns: coordinates
    Matrix v;
    Matrix a;  // reconstructed from the right-hand side
    Method method = Method::rk45;
    IntegratorControl control;
    std::size_t steps = 0;
    std::size_t rejected = 0;

    [[nodiscard]] std::size_t points() const noexcept { return t.size(); }
    [[nodiscard]] std::size_t coords() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

/// Integrates from (x0, v0) at t0. Velocities of first-order coordinates in
/// v0 are ignored; they follow from the algebraic rows.
Trajectory simulate(const FirstOrderSystem& sys, const Vector& x0, const Vector& v0, double t0, double t1,
                    const IntegratorControl& ctrl = {});

/// Max over grid points and coordinates of |el_residual|.
double ikvl_residual(const LagrangianSystem& sys, const Trajectory& traj);

struct ElementSeries {
    std::string name;
    ElementKind kind = ElementKind::resistor;
    Modulation modulation = Modulation::none;
    std::vector<double> q, I, phi, V;
    std::vector<double> sigma, rho;  // empty where not defined
};

struct ElementWaveforms {
    Formulation formulation = Formulation::loop;
    std::vector<double> t;
    std::vector<ElementSeries> elements;

    [[nodiscard]] const ElementSeries& at(std::string_view name) const;
};

/// Per-element q, I, phi, V (and sigma or rho) from the coordinate series.
ElementWaveforms branch_waveforms(const Circuit& circuit, const Trajectory& traj);

/// d/dt of a series on a (possibly non-uniform) grid: five-point stencils,
/// central in the interior and one-sided near the ends.
std::vector<double> grid_derivative(std::span<const double> t, std::span<const double> y);

/// True when the element is driven by a current (charge-modulated, or R, L),
/// false for voltage drive (flux-modulated, or C).
[[nodiscard]] bool current_driven(const Element& element);

/// Drives a single element from a zero state. The returned waveforms hold
/// one series for the element.
ElementWaveforms drive_element(const Element& element, const SourceWaveform& drive, double t0, double t1,
                               const IntegratorControl& ctrl = {});

struct HysteresisPair {
    std::vector<double> u;  // input: the drive variable
    std::vector<double> y;  // output paired with the drive
    std::string u_name;
    std::string y_name;
    double K = 0.0;         // bound on |y|/|u| near u = 0
};

/// Input/output pair of a driven element and the incremental-value bound
/// over the traversed state range.
HysteresisPair hysteresis_pair(const Element& element, const ElementSeries& series);

struct PinchReport {
    bool pinched = false;
    double eps = 0.0;
    double K = 0.0;
    std::size_t gated_points = 0;   // grid points with |u| <= eps
    double max_gated_output = 0.0;  // max |y| over gated points
    double area_positive = 0.0;     // enclosed area for u >= 0
    double area_negative = 0.0;     // enclosed area for u < 0
};

PinchReport pinch_check(std::span<const double> u, std::span<const double> y, double eps, double K);

} // namespace memlag
