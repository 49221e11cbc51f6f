#pragma once

// =============================================================================
// First-order (state-space) form of an assembled system
// =============================================================================
// State layout: [x_0 .. x_{n-1}, v_s for each second-order coordinate s].
// Velocities of first-order coordinates (no inertial element) are not state;
// they are recovered at every evaluation by solving the coordinate's
// algebraic Euler-Lagrange row, which makes the system semi-explicit index 1.
// =============================================================================

#include "memlag/lagrangian.hpp"

#include <span>
#include <vector>

namespace memlag {

struct Kinematics {
    Vector x;
    Vector v;
    Vector a;
};

class FirstOrderSystem {
public:
    explicit FirstOrderSystem(LagrangianSystem system);

    [[nodiscard]] const LagrangianSystem& system() const noexcept { return system_; }
    [[nodiscard]] std::size_t coords() const noexcept { return system_.size(); }
    [[nodiscard]] std::size_t state_dim() const noexcept { return system_.size() + second_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& second_order() const noexcept { return second_; }
    [[nodiscard]] const std::vector<std::size_t>& first_order() const noexcept { return first_; }

    /// Packs x0 and the second-order entries of v0; other v0 entries are ignored.
    [[nodiscard]] std::vector<double> pack(const Vector& x0, const Vector& v0) const;

    /// Full (x, v, a) at a state, with algebraic velocities and all
    /// accelerations reconstructed analytically.
    [[nodiscard]] Kinematics kinematics(double t, std::span<const double> y) const;

    void rhs(double t, std::span<const double> y, std::span<double> dydt) const;

private:
    /// Solves the first-order rows for their velocities; v holds the
    /// second-order velocities on entry.
    void solve_algebraic(const Vector& x, Vector& v, double t) const;
    [[nodiscard]] Vector second_order_accel(const Vector& x, const Vector& v, double t) const;

    LagrangianSystem system_;
    std::vector<std::size_t> second_;
    std::vector<std::size_t> first_;
};

/// Throws NumericError("degenerate inertia ...") or ("algebraic row
/// unsolvable ...") when a coordinate cannot be put in explicit form.
FirstOrderSystem to_first_order(const LagrangianSystem& system);

} // namespace memlag
