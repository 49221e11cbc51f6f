#pragma once

// =============================================================================
// Data-parallel kernels
// =============================================================================
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The unqualified entry points dispatch once at first use to the
// best variant the running CPU supports. Tests compare the variants directly.
// =============================================================================

#include <cstddef>
#include <span>
#include <string_view>

namespace memlag::kernels {

/// Signed areas swept relative to the origin, split by the sign of u.
struct HalfPlaneAreas {
    double positive = 0.0;  // u >= 0
    double negative = 0.0;  // u < 0
};

/// Largest |y| over indices where |u| <= eps, and the number of such indices.
struct GatedMax {
    double max_abs = 0.0;
    std::size_t count = 0;
};

namespace scalar {
void horner(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out);
void horner_deriv(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out);
double max_abs(std::span<const double> ys);
HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y);
GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps);
} // namespace scalar

namespace avx2 {
[[nodiscard]] bool available() noexcept;
void horner(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out);
void horner_deriv(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out);
double max_abs(std::span<const double> ys);
HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y);
GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps);
} // namespace avx2

/// Name of the variant selected by the dispatcher ("avx2" or "scalar").
/// Setting MEMLAG_KERNELS=scalar in the environment forces the scalar path.
[[nodiscard]] std::string_view active_backend();

/// out[i] = sum_k coeffs[k] * xs[i]^k
void horner(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out);
/// out[i] = sum_k k * coeffs[k] * xs[i]^(k-1)
void horner_deriv(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out);
double max_abs(std::span<const double> ys);
HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y);
GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps);

} // namespace memlag::kernels
