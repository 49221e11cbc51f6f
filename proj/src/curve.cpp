#include "memlag/curve.hpp"

#include "memlag/errors.hpp"
#include "memlag/format.hpp"
#include "memlag/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace memlag {

namespace {

constexpr int kMonotoneSamples = 4097;

double horner(std::span<const double> c, double x) {
    if (c.empty()) return 0.0;
    double acc = c.back();
    for (std::size_t k = c.size() - 1; k-- > 0;) acc = acc * x + c[k];
    return acc;
}

std::string describe(const Interval& d) {
    return "[" + format_real(d.lo) + ", " + format_real(d.hi) + "]";
}

std::string name_of(const std::string& label) { return label.empty() ? std::string("<anonymous>") : label; }

void trim_trailing_zeros(std::vector<double>& c) {
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
}

} // namespace

bool Interval::is_finite() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }

// =============================================================================
// Construction
// =============================================================================

ScalarCurve ScalarCurve::polynomial(std::vector<double> coeffs, std::optional<Interval> domain) {
    if (coeffs.empty()) throw DefinitionError("polynomial curve needs at least one coefficient");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw DefinitionError("polynomial coefficient is not finite");
    trim_trailing_zeros(coeffs);

    ScalarCurve c;
    c.kind_ = Kind::polynomial;
    c.coeffs_ = std::move(coeffs);
    c.domain_ = domain.value_or(kDefaultPolyDomain);
    if (!c.domain_.is_finite() || !(c.domain_.lo < c.domain_.hi))
        throw DefinitionError("polynomial domain must be a finite interval with lo < hi, got " + describe(c.domain_));
    c.build_tables();

    if (c.domain_.contains(0.0) && c.coeffs_[0] != 0.0)
        throw DefinitionError("curve must pass through the origin (constant coefficient " +
                              format_real(c.coeffs_[0]) + ")");

    // Strict monotonicity: uniform samples, log-spaced samples near the origin,
    // the endpoints, and for cubics the exact minimiser of the derivative.
    std::vector<double> xs;
    xs.reserve(kMonotoneSamples + 200);
    const double lo = c.domain_.lo, hi = c.domain_.hi;
    for (int i = 0; i < kMonotoneSamples; ++i)
        xs.push_back(lo + (hi - lo) * static_cast<double>(i) / (kMonotoneSamples - 1));
    const double reach = std::max(std::fabs(lo), std::fabs(hi));
    for (int e = -12; e <= 0; ++e) {
        for (double m : {1.0, 2.0, 5.0}) {
            const double r = reach * m * std::pow(10.0, e);
            if (c.domain_.contains(r)) xs.push_back(r);
            if (c.domain_.contains(-r)) xs.push_back(-r);
        }
    }
    if (c.coeffs_.size() == 4 && c.coeffs_[3] != 0.0) {
        const double vertex = -c.coeffs_[2] / (3.0 * c.coeffs_[3]);
        if (c.domain_.contains(vertex)) xs.push_back(vertex);
    }
    std::vector<double> d(xs.size());
    kernels::horner(c.d1_, xs, d);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(d[i] > 0.0))
            throw DefinitionError("polynomial curve is not strictly increasing on " + describe(c.domain_) +
                                  " (derivative " + format_real(d[i]) + " at x = " + format_real(xs[i]) + ")");
    }
    return c;
}

ScalarCurve ScalarCurve::piecewise_linear(std::vector<Point> points, std::optional<Interval> domain) {
    if (points.size() < 2) throw DefinitionError("piecewise-linear curve needs at least two breakpoints");
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DefinitionError("breakpoint is not finite");
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (!(points[k].x > points[k - 1].x))
            throw DefinitionError("breakpoint x values must be strictly increasing (at index " + std::to_string(k) +
                                  ")");
        if (!(points[k].y > points[k - 1].y))
            throw DefinitionError("piecewise-linear segment " + std::to_string(k) + " has non-positive slope");
    }

    ScalarCurve c;
    c.kind_ = Kind::piecewise_linear;
    c.points_ = std::move(points);
    const Interval hull{c.points_.front().x, c.points_.back().x};
    c.domain_ = domain.value_or(hull);
    if (!(c.domain_.lo < c.domain_.hi) || c.domain_.lo < hull.lo || c.domain_.hi > hull.hi)
        throw DefinitionError("piecewise-linear domain " + describe(c.domain_) + " must lie within the breakpoint hull " +
                              describe(hull));
    c.build_tables();

    if (c.domain_.contains(0.0)) {
        double scale = 0.0;
        for (const auto& p : c.points_) scale = std::max(scale, std::fabs(p.y));
        if (std::fabs(c.eval(0.0)) > 1e-12 * scale)
            throw DefinitionError("curve must pass through the origin (value " + format_real(c.eval(0.0)) + " at 0)");
    }
    return c;
}

ScalarCurve ScalarCurve::linear(double slope) {
    if (!(slope > 0.0) || !std::isfinite(slope))
        throw DefinitionError("linear curve needs a strictly positive finite slope, got " + format_real(slope));
    ScalarCurve c;
    c.kind_ = Kind::polynomial;
    c.coeffs_ = {0.0, slope};
    c.domain_ = Interval{};
    c.build_tables();
    return c;
}

ScalarCurve ScalarCurve::with_label(std::string label) const {
    ScalarCurve c = *this;
    c.label_ = std::move(label);
    return c;
}

void ScalarCurve::build_tables() {
    if (kind_ == Kind::polynomial) {
        const std::size_t n = coeffs_.size();
        d1_.assign(n > 1 ? n - 1 : 1, 0.0);
        for (std::size_t k = 1; k < n; ++k) d1_[k - 1] = static_cast<double>(k) * coeffs_[k];
        d2_.assign(n > 2 ? n - 2 : 1, 0.0);
        for (std::size_t k = 2; k < n; ++k) d2_[k - 2] = static_cast<double>(k * (k - 1)) * coeffs_[k];
        integral_.assign(n + 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) integral_[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
        // u * p'(u) = sum k c_k u^k, integrated term by term
        xdp_integral_.assign(n + 1, 0.0);
        for (std::size_t k = 1; k < n; ++k)
            xdp_integral_[k + 1] = static_cast<double>(k) * coeffs_[k] / static_cast<double>(k + 1);
        return;
    }
    const std::size_t m = points_.size();
    cum_area_.assign(m, 0.0);
    cum_inv_area_.assign(m, 0.0);
    for (std::size_t k = 1; k < m; ++k) {
        const auto& a = points_[k - 1];
        const auto& b = points_[k];
        cum_area_[k] = cum_area_[k - 1] + 0.5 * (a.y + b.y) * (b.x - a.x);
        cum_inv_area_[k] = cum_inv_area_[k - 1] + 0.5 * (a.x + b.x) * (b.y - a.y);
    }
}

// =============================================================================
// Evaluation
// =============================================================================

bool ScalarCurve::is_linear_through_origin() const noexcept {
    if (kind_ == Kind::polynomial) return coeffs_.size() <= 2 && coeffs_[0] == 0.0;
    if (points_.size() < 2) return false;
    const double s0 = (points_[1].y - points_[0].y) / (points_[1].x - points_[0].x);
    for (std::size_t k = 1; k < points_.size(); ++k) {
        const double s = (points_[k].y - points_[k - 1].y) / (points_[k].x - points_[k - 1].x);
        if (s != s0) return false;
    }
    return true;
}

void ScalarCurve::require_in_domain(double x) const {
    if (!domain_.contains(x)) {
        throw DomainError(label_, x,
                          "curve '" + name_of(label_) + "' evaluated at x = " + format_real(x) + " outside its domain " +
                              describe(domain_));
    }
}

std::size_t ScalarCurve::segment_of(double x) const {
    // right-continuous: a breakpoint belongs to the segment on its right,
    // except the last breakpoint which closes the final segment
    auto it = std::upper_bound(points_.begin(), points_.end(), x, [](double v, const Point& p) { return v < p.x; });
    std::size_t idx = static_cast<std::size_t>(it - points_.begin());
    if (idx == 0) idx = 1;
    if (idx >= points_.size()) idx = points_.size() - 1;
    return idx - 1;
}

double ScalarCurve::eval(double x) const {
    require_in_domain(x);
    if (kind_ == Kind::polynomial) return horner(coeffs_, x);
    const std::size_t s = segment_of(x);
    const auto& a = points_[s];
    const auto& b = points_[s + 1];
    return a.y + (b.y - a.y) * ((x - a.x) / (b.x - a.x));
}

double ScalarCurve::deriv(double x) const {
    require_in_domain(x);
    if (kind_ == Kind::polynomial) return horner(d1_, x);
    const std::size_t s = segment_of(x);
    return (points_[s + 1].y - points_[s].y) / (points_[s + 1].x - points_[s].x);
}

double ScalarCurve::deriv2(double x) const {
    require_in_domain(x);
    if (kind_ == Kind::polynomial) return horner(d2_, x);
    return 0.0;
}

double ScalarCurve::antideriv(double x) const {
    require_in_domain(x);
    if (!domain_.contains(0.0))
        throw DomainError(label_, 0.0,
                          "curve '" + name_of(label_) + "': integration base point 0 lies outside the domain " +
                              describe(domain_));
    if (kind_ == Kind::polynomial) return horner(integral_, x);
    // area from the first breakpoint to x, minus the same to 0
    auto area_to = [this](double v) {
        const std::size_t s = segment_of(v);
        const auto& a = points_[s];
        const auto& b = points_[s + 1];
        const double yv = a.y + (b.y - a.y) * ((v - a.x) / (b.x - a.x));
        return cum_area_[s] + 0.5 * (a.y + yv) * (v - a.x);
    };
    return area_to(x) - area_to(0.0);
}

Interval ScalarCurve::range() const {
    if (kind_ == Kind::polynomial && !domain_.is_finite()) return Interval{};
    return Interval{eval(domain_.lo), eval(domain_.hi)};
}

double ScalarCurve::inverse(double y) const {
    if (!std::isfinite(y)) throw RangeError("curve '" + name_of(label_) + "': cannot invert non-finite value");
    if (kind_ == Kind::polynomial && !domain_.is_finite()) return y / coeffs_[1];

    const Interval r = range();
    const double slack = 1e-12 * (1.0 + std::fabs(y));
    if (y < r.lo - slack || y > r.hi + slack) {
        throw RangeError("curve '" + name_of(label_) + "': value " + format_real(y) + " outside the range " +
                         describe(r));
    }
    if (y <= r.lo) return domain_.lo;
    if (y >= r.hi) return domain_.hi;

    if (kind_ == Kind::piecewise_linear) {
        auto it = std::upper_bound(points_.begin(), points_.end(), y, [](double v, const Point& p) { return v < p.y; });
        std::size_t idx = static_cast<std::size_t>(it - points_.begin());
        if (idx == 0) idx = 1;
        if (idx >= points_.size()) idx = points_.size() - 1;
        const auto& a = points_[idx - 1];
        const auto& b = points_[idx];
        const double x = a.x + (b.x - a.x) * ((y - a.y) / (b.y - a.y));
        return std::clamp(x, domain_.lo, domain_.hi);
    }

    // Safeguarded Newton on a shrinking bracket: bisect whenever the Newton
    // step leaves the bracket or fails to halve the residual.
    const double tol = 1e-12 * (1.0 + std::fabs(y));
    double lo = domain_.lo, hi = domain_.hi;
    double x = (coeffs_.size() > 1 && coeffs_[1] > 0.0) ? y / coeffs_[1] : 0.5 * (lo + hi);
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    double f = horner(coeffs_, x) - y;
    double best_x = x, best_f = std::fabs(f);
    // a few plain Newton steps take a converged iterate to full precision
    const auto polish = [&](double xc, double fc) {
        for (int k = 0; k < 3 && fc != 0.0; ++k) {
            const double xn = xc - fc / horner(d1_, xc);
            if (!(xn >= domain_.lo && xn <= domain_.hi)) break;
            const double fn = horner(coeffs_, xn) - y;
            if (!(std::fabs(fn) < std::fabs(fc))) break;
            xc = xn;
            fc = fn;
        }
        return xc;
    };
    for (int iter = 0; iter < 400; ++iter) {
        if (std::fabs(f) <= tol) return polish(x, f);
        if (f > 0.0) hi = x; else lo = x;
        const double dfdx = horner(d1_, x);
        double next = x - f / dfdx;
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        double fn = horner(coeffs_, next) - y;
        if (std::fabs(fn) > 0.5 * std::fabs(f) && next != 0.5 * (lo + hi)) {
            next = 0.5 * (lo + hi);
            fn = horner(coeffs_, next) - y;
        }
        if (next == x) break;
        x = next;
        f = fn;
        if (std::fabs(f) < best_f) {
            best_f = std::fabs(f);
            best_x = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(x))) break;
    }
    return best_x;
}

double ScalarCurve::inverse_antideriv(double y) const {
    if (kind_ == Kind::polynomial) {
        // substitute s = p(u): int_0^y p^{-1}(s) ds = int_0^x u p'(u) du with x = p^{-1}(y)
        const double x = inverse(y);
        if (!domain_.contains(0.0))
            throw DomainError(label_, 0.0, "curve '" + name_of(label_) + "': integration base point 0 outside domain");
        return horner(xdp_integral_, x);
    }
    (void)inverse(y);  // range check
    const Interval r = range();
    if (!r.contains(0.0))
        throw DomainError(label_, 0.0, "curve '" + name_of(label_) + "': integration base point 0 outside range");
    auto area_to = [this](double v) {
        auto it = std::upper_bound(points_.begin(), points_.end(), v, [](double s, const Point& p) { return s < p.y; });
        std::size_t idx = static_cast<std::size_t>(it - points_.begin());
        if (idx == 0) idx = 1;
        if (idx >= points_.size()) idx = points_.size() - 1;
        const std::size_t s = idx - 1;
        const auto& a = points_[s];
        const auto& b = points_[s + 1];
        const double xv = a.x + (b.x - a.x) * ((v - a.y) / (b.y - a.y));
        return cum_inv_area_[s] + 0.5 * (a.x + xv) * (v - a.y);
    };
    return area_to(std::clamp(y, r.lo, r.hi)) - area_to(0.0);
}

void ScalarCurve::eval_batch(std::span<const double> xs, std::span<double> out) const {
    for (double x : xs) require_in_domain(x);
    if (kind_ == Kind::polynomial) {
        kernels::horner(coeffs_, xs, out);
        return;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = eval(xs[i]);
}

void ScalarCurve::deriv_batch(std::span<const double> xs, std::span<double> out) const {
    for (double x : xs) require_in_domain(x);
    if (kind_ == Kind::polynomial) {
        kernels::horner_deriv(coeffs_, xs, out);
        return;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = deriv(xs[i]);
}

bool ScalarCurve::operator==(const ScalarCurve& other) const {
    return kind_ == other.kind_ && domain_ == other.domain_ && coeffs_ == other.coeffs_ && points_ == other.points_;
}

} // namespace memlag
