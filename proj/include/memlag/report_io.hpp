#pragma once

// =============================================================================
// JSON reports and CSV time series
// =============================================================================

#include "memlag/selfadjoint.hpp"
#include "memlag/sim.hpp"

#include <iosfwd>
#include <string>

namespace memlag {

/// {"verdict", "conditions": [{"name", "max_violation", "worst_point": {"x", "v"}}], "samples", "tol"}
std::string sa_report_json(const SAReport& report);

struct PinchSummary {
    std::string element;
    HysteresisPair pair;
    PinchReport report;
};

std::string pinch_report_json(const PinchSummary& summary);

/// t, coordinate columns (x, x_dot, x_ddot), then q, I, phi, V, sigma, rho
/// for each element. A leading `# units:` comment names the units.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const ElementWaveforms& waves);

/// t followed by the element columns only.
void write_waveforms_csv(std::ostream& os, const ElementWaveforms& waves);

} // namespace memlag
