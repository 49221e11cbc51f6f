#include "memlag/kernels.hpp"

#include <cmath>

namespace memlag::kernels::scalar {

void horner(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
    const std::size_t n = xs.size();
    if (coeffs.empty()) {
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
        return;
    }
    const std::size_t top = coeffs.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = coeffs[top];
        for (std::size_t k = top; k-- > 0;) acc = acc * xs[i] + coeffs[k];
        out[i] = acc;
    }
}

void horner_deriv(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
    const std::size_t n = xs.size();
    if (coeffs.size() < 2) {
        for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
        return;
    }
    const std::size_t top = coeffs.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = static_cast<double>(top) * coeffs[top];
        for (std::size_t k = top - 1; k >= 1; --k) acc = acc * xs[i] + static_cast<double>(k) * coeffs[k];
        out[i] = acc;
    }
}

double max_abs(std::span<const double> ys) {
    double m = 0.0;
    for (double y : ys) {
        const double a = std::fabs(y);
        if (a > m) m = a;
    }
    return m;
}

HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y) {
    double pos = 0.0;
    double neg = 0.0;
    const std::size_t n = u.size() < y.size() ? u.size() : y.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double u0 = u[k], u1 = u[k + 1];
        const double y0 = y[k], y1 = y[k + 1];
        const bool p0 = u0 >= 0.0;
        const bool p1 = u1 >= 0.0;
        if (p0 == p1) {
            const double cross = u0 * y1 - u1 * y0;
            (p0 ? pos : neg) += cross;
        } else {
            // split the segment where it crosses u = 0
            const double ys = y0 + (y1 - y0) * (-u0 / (u1 - u0));
            (p0 ? pos : neg) += u0 * ys;
            (p1 ? pos : neg) += -u1 * ys;
        }
    }
    return {0.5 * pos, 0.5 * neg};
}

GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps) {
    GatedMax r;
    const std::size_t n = u.size() < y.size() ? u.size() : y.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(u[i]) <= eps) {
            ++r.count;
            const double a = std::fabs(y[i]);
            if (a > r.max_abs) r.max_abs = a;
        }
    }
    return r;
}

} // namespace memlag::kernels::scalar
