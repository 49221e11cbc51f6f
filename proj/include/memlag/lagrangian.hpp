#pragma once

// =============================================================================
// Lagrangian assembly over integrated coordinates
// =============================================================================
// Loop analysis uses integrated loop charges sigma (v = dsigma/dt is the loop
// charge); node analysis uses integrated node fluxes rho (v is the node flux).
// Every element contributes a scalar function of its branch state
//     x_b = sum_k sign_k x[coord_k],   v_b = sum_k sign_k v[coord_k]
// to one of three sums: the kinetic state function (of v_b), the potential
// state function (of x_b), or the action function (of v_b). Sources add the
// linear potential x_b * integral(e) to the Lagrangian.
//
// All partial derivatives are analytic; nothing in this module differences
// numerically.
// =============================================================================

#include "memlag/linalg.hpp"
#include "memlag/netlist.hpp"

#include <functional>
#include <string>
#include <vector>

namespace memlag {

enum class TermRole {
    kinetic,       // + integral_0^{v_b} f            (T* in loop form, U* in node form)
    potential,     // - integral_0^{x_b} f            (U in loop form, T in node form)
    dissipative,   // action: integral_0^{v_b} f      (D in loop form, D* in node form)
    path_kinetic,  // + 1/2 f'(x_b) v_b^2             (path-dependent co-energy, demonstration only)
};

struct BranchTerm {
    TermRole role = TermRole::kinetic;
    ScalarCurve curve = ScalarCurve::linear(1.0);
    std::vector<Membership> members;  // 0-based coordinates
    std::string element;
};

struct SourceTerm {
    SourceWaveform waveform;
    std::vector<Membership> members;  // 0-based coordinates
    std::string element;
};

class LagrangianSystem {
public:
    LagrangianSystem(Formulation formulation, std::size_t n, std::vector<BranchTerm> terms,
                     std::vector<SourceTerm> sources);

    [[nodiscard]] Formulation formulation() const noexcept { return formulation_; }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] const std::vector<BranchTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] const std::vector<SourceTerm>& sources() const noexcept { return sources_; }
    /// True where the coordinate carries an inertial element.
    [[nodiscard]] const std::vector<bool>& second_order_mask() const noexcept { return second_order_; }

    [[nodiscard]] double lagrangian(const Vector& x, const Vector& v, double t) const;
    [[nodiscard]] double action(const Vector& v) const;
    /// Integrated source contributions per coordinate.
    [[nodiscard]] Vector forcing(double t) const;
    /// Time derivative of forcing(t).
    [[nodiscard]] Vector forcing_rate(double t) const;

    /// Kinetic and potential state-function totals at (x, v).
    struct Stored {
        double kinetic = 0.0;
        double potential = 0.0;
    };
    [[nodiscard]] Stored stored(const Vector& x, const Vector& v) const;

    // analytic partials of the Lagrangian (sources included) and the action
    [[nodiscard]] Vector grad_x(const Vector& x, const Vector& v, double t) const;
    [[nodiscard]] Vector grad_v(const Vector& x, const Vector& v) const;
    /// d^2 L / dv dv
    [[nodiscard]] Matrix inertia(const Vector& x, const Vector& v) const;
    /// d^2 L / dv_i dx_j
    [[nodiscard]] Matrix mixed(const Vector& x, const Vector& v) const;
    /// d^2 (potential state function) / dx dx
    [[nodiscard]] Matrix stiffness(const Vector& x) const;
    [[nodiscard]] Vector action_grad(const Vector& v) const;
    [[nodiscard]] Matrix action_hessian(const Vector& v) const;

    /// d/dt dL/dv - dL/dx + dD/dv evaluated with acceleration a.
    [[nodiscard]] Vector el_residual(const Vector& x, const Vector& v, const Vector& a, double t) const;

private:
    Formulation formulation_;
    std::size_t n_;
    std::vector<BranchTerm> terms_;
    std::vector<SourceTerm> sources_;
    std::vector<bool> second_order_;
};

/// A(x, v, t) * a + B(x, v, t) reproduces the Euler-Lagrange residual.
struct ABDecomposition {
    std::size_t n = 0;
    std::function<Matrix(const Vector&, const Vector&, double)> A;
    std::function<Vector(const Vector&, const Vector&, double)> B;
};

LagrangianSystem build_loop_system(const Circuit& circuit);
LagrangianSystem build_node_system(const Circuit& circuit);
/// Dispatches on the circuit's declared formulation.
LagrangianSystem build_system(const Circuit& circuit);

/// The charge-coordinate Lagrangian 1/2 L_M(q) qdot^2 - q^2/(2C) built from
/// the meminductor incremental value. It is not a state function and its
/// Euler-Lagrange equation carries only half of the L_M'(q) qdot^2 term.
LagrangianSystem naive_path_lagrangian(const Circuit& circuit);

ABDecomposition extract_AB(const LagrangianSystem& system);

} // namespace memlag
