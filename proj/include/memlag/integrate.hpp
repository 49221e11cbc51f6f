#pragma once

// =============================================================================
// Explicit Runge-Kutta integration: classical RK4 with a fixed step, and the
// Dormand-Prince 5(4) pair with PI step-size control. Dense output uses cubic
// Hermite interpolation between accepted steps.
// =============================================================================

#include "memlag/errors.hpp"

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace memlag {

enum class Method { rk4, rk45 };

[[nodiscard]] std::string_view method_name(Method m) noexcept;

struct IntegratorControl {
    Method method = Method::rk45;
    double h = 1e-3;      // rk4 step; rk45 initial step (0 picks one)
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 50'000'000;
    /// When non-zero, the solution is resampled onto this many uniformly
    /// spaced points (including both ends) by Hermite interpolation.
    std::size_t dense_points = 0;
};

/// dy/dt = f(t, y)
using Rhs = std::function<void(double, std::span<const double>, std::span<double>)>;

/// The state left a constitutive curve's domain during integration.
class DomainExitError : public NumericError {
public:
    DomainExitError(double t, std::string element, const std::string& what)
        : NumericError(what), t_(t), element_(std::move(element)) {}

    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] const std::string& element() const noexcept { return element_; }

private:
    double t_;
    std::string element_;
};

struct Solution {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    std::vector<std::vector<double>> dy;  // f(t, y) at every grid point
    Method method = Method::rk45;
    std::size_t steps = 0;
    std::size_t rejected = 0;

    /// Cubic Hermite interpolation at t inside the grid.
    [[nodiscard]] std::vector<double> sample(double t) const;
};

Solution integrate(const Rhs& f, std::span<const double> y0, double t0, double t1, const IntegratorControl& ctrl);

} // namespace memlag
