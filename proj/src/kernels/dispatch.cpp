#include "memlag/kernels.hpp"

#include <cstdlib>
#include <string>

namespace memlag::kernels {

namespace {

struct Table {
    std::string_view name;
    void (*horner)(std::span<const double>, std::span<const double>, std::span<double>);
    void (*horner_deriv)(std::span<const double>, std::span<const double>, std::span<double>);
    double (*max_abs)(std::span<const double>);
    HalfPlaneAreas (*shoelace)(std::span<const double>, std::span<const double>);
    GatedMax (*gated)(std::span<const double>, std::span<const double>, double);
};

Table select() {
    const char* forced = std::getenv("MEMLAG_KERNELS");
    const bool want_scalar = forced != nullptr && std::string(forced) == "scalar";
    if (!want_scalar && avx2::available()) {
        return {"avx2", avx2::horner, avx2::horner_deriv, avx2::max_abs, avx2::shoelace_half_planes,
                avx2::gated_max_abs};
    }
    return {"scalar", scalar::horner, scalar::horner_deriv, scalar::max_abs, scalar::shoelace_half_planes,
            scalar::gated_max_abs};
}

const Table& table() {
    static const Table t = select();
    return t;
}

} // namespace

std::string_view active_backend() { return table().name; }

void horner(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
    table().horner(coeffs, xs, out);
}

void horner_deriv(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
    table().horner_deriv(coeffs, xs, out);
}

double max_abs(std::span<const double> ys) { return table().max_abs(ys); }

HalfPlaneAreas shoelace_half_planes(std::span<const double> u, std::span<const double> y) {
    return table().shoelace(u, y);
}

GatedMax gated_max_abs(std::span<const double> u, std::span<const double> y, double eps) {
    return table().gated(u, y, eps);
}

} // namespace memlag::kernels
