#pragma once

// =============================================================================
// ScalarCurve - strictly increasing one-dimensional constitutive relation
// =============================================================================
// Two representations are supported: a polynomial given by ascending
// coefficients, and a piecewise-linear curve given by sorted breakpoints.
// Both admit exact derivatives, antiderivatives (base point 0) and inverses,
// which keeps the state functions built on top of them free of quadrature
// error.
// =============================================================================

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace memlag {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
    [[nodiscard]] bool is_finite() const noexcept;
    bool operator==(const Interval&) const = default;
};

/// Default domain of a polynomial curve literal when none is declared.
inline constexpr Interval kDefaultPolyDomain{-1.0e6, 1.0e6};

class ScalarCurve {
public:
    enum class Kind { polynomial, piecewise_linear };

    struct Point {
        double x;
        double y;
        bool operator==(const Point&) const = default;
    };

    /// Ascending coefficients c0 + c1 x + c2 x^2 + ...; domain defaults to
    /// kDefaultPolyDomain. Throws DefinitionError unless strictly increasing
    /// on the domain and passing through the origin when 0 is in the domain.
    static ScalarCurve polynomial(std::vector<double> coeffs, std::optional<Interval> domain = std::nullopt);

    /// Breakpoints with strictly increasing x and strictly positive slopes;
    /// domain defaults to the breakpoint hull and may not exceed it.
    static ScalarCurve piecewise_linear(std::vector<Point> points, std::optional<Interval> domain = std::nullopt);

    /// y = slope * x over the whole real line (conventional linear elements).
    static ScalarCurve linear(double slope);

    [[nodiscard]] ScalarCurve with_label(std::string label) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const Interval& domain() const noexcept { return domain_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coeffs_; }
    [[nodiscard]] std::span<const Point> points() const noexcept { return points_; }
    [[nodiscard]] bool is_linear_through_origin() const noexcept;

    [[nodiscard]] double eval(double x) const;
    [[nodiscard]] double deriv(double x) const;
    [[nodiscard]] double deriv2(double x) const;
    /// Integral of the curve from 0 to x.
    [[nodiscard]] double antideriv(double x) const;
    [[nodiscard]] double inverse(double y) const;
    /// Integral of the inverse curve from 0 to y (the complementary area).
    [[nodiscard]] double inverse_antideriv(double y) const;
    [[nodiscard]] Interval range() const;

    /// Vectorised evaluation over a batch of points (polynomials use the
    /// SIMD kernels). Throws DomainError on the first out-of-domain point.
    void eval_batch(std::span<const double> xs, std::span<double> out) const;
    void deriv_batch(std::span<const double> xs, std::span<double> out) const;

    /// Representation equality; labels are ignored.
    bool operator==(const ScalarCurve& other) const;

private:
    ScalarCurve() = default;

    void require_in_domain(double x) const;
    [[nodiscard]] std::size_t segment_of(double x) const;
    void build_tables();

    Kind kind_ = Kind::polynomial;
    Interval domain_{};
    std::string label_;
    std::vector<double> coeffs_;
    std::vector<Point> points_;

    // derived tables
    std::vector<double> d1_;        // derivative coefficients
    std::vector<double> d2_;        // second derivative coefficients
    std::vector<double> integral_;  // antiderivative coefficients (zero constant)
    std::vector<double> xdp_integral_;  // coefficients of the integral of u * p'(u)
    std::vector<double> cum_area_;      // pwl: integral from 0 to each breakpoint
    std::vector<double> cum_inv_area_;  // pwl: integral of the inverse from 0 to each y breakpoint
};

} // namespace memlag
