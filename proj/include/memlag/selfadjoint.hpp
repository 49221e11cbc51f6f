#pragma once

// =============================================================================
// Helmholtz self-adjointness conditions for A(x, v) a + B(x, v) = 0
// =============================================================================
//   symmetry            A_ij = A_ji
//   A_v_compatibility   dA_ik/dv_j = dA_jk/dv_i
//   B_curl              dB_i/dx_j - dB_j/dx_i = 1/2 d/dx_k (dB_i/dv_j - dB_j/dv_i) v_k
//   B_v_symmetry        dB_i/dv_j + dB_j/dv_i = 2 (dA_ij/dx_k) v_k
// The velocity-only form is the special case dA/dx = 0. Conditions are
// checked numerically at low-discrepancy sample points; a positive verdict
// holds on the sampled region only.
// =============================================================================

#include "memlag/lagrangian.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace memlag {

struct Region {
    Vector x_lo, x_hi, v_lo, v_hi;
    double t = 0.0;

    /// [lo, hi]^n for both x and v.
    static Region cube(std::size_t n, double lo = -1.0, double hi = 1.0);
};

struct SAOptions {
    std::size_t samples = 512;
    double tol = 1e-6;
    /// First partials use h = h_rel * (1 + |coordinate|).
    double h_rel = 1e-5;
    /// The nested x-derivative of the v-Jacobian in B_curl uses this step.
    double h2_rel = 1e-4;
    /// Non-zero seeds apply a random shift (mod 1) to the Halton sequence.
    std::uint64_t seed = 0;
};

enum class SACondition { symmetry, A_v_compatibility, B_curl, B_v_symmetry };
inline constexpr std::array<SACondition, 4> kAllConditions = {
    SACondition::symmetry, SACondition::A_v_compatibility, SACondition::B_curl, SACondition::B_v_symmetry};

[[nodiscard]] std::string_view condition_name(SACondition c) noexcept;

struct ConditionResult {
    SACondition condition;
    double max_violation = 0.0;
    Vector worst_x;
    Vector worst_v;
};

struct SAReport {
    bool self_adjoint = true;
    std::vector<ConditionResult> conditions;  // in kAllConditions order
    std::size_t samples = 0;
    double tol = 0.0;

    [[nodiscard]] const ConditionResult& worst() const;
    [[nodiscard]] const ConditionResult& result(SACondition c) const;
};

SAReport check_self_adjoint(const ABDecomposition& ab, const Region& region, const SAOptions& options = {});

/// [-1, 1]^n shrunk per coordinate so every branch state of the system stays
/// inside its curve's domain (finite-difference stencils included).
Region default_region(const LagrangianSystem& system);

/// Points of the (optionally shifted) Halton sequence in [0, 1)^dim.
std::vector<double> halton_point(std::size_t index, std::size_t dim, std::uint64_t seed);

} // namespace memlag
