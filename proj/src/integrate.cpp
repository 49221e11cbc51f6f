#include "memlag/integrate.hpp"

#include "memlag/format.hpp"

#include <algorithm>
#include <cmath>

namespace memlag {

namespace {

using State = std::vector<double>;

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

class Stepper {
public:
    Stepper(const Rhs& f, std::size_t dim) : f_(f), dim_(dim) {}

    void eval(double t, const State& y, State& out) const {
        try {
            f_(t, y, out);
        } catch (const DomainError& e) {
            throw DomainExitError(t, e.curve(),
                                  "state left the domain of element '" + e.curve() + "' at t = " + format_real(t) + ": " +
                                      e.what());
        }
        for (double v : out)
            if (!std::isfinite(v)) throw NumericError("non-finite derivative at t = " + format_real(t));
    }

    State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) const {
        State out(y);
        for (std::size_t i = 0; i < dim_; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * (*k)[i];
            out[i] += h * acc;
        }
        return out;
    }

    std::size_t dim() const { return dim_; }

private:
    const Rhs& f_;
    std::size_t dim_;
};

Solution integrate_rk4(const Stepper& st, const State& y0, double t0, double t1, const IntegratorControl& ctrl) {
    if (!(ctrl.h > 0.0)) throw Error("rk4 needs a positive step");
    const double span = t1 - t0;
    const auto steps = static_cast<std::size_t>(std::ceil(span / ctrl.h - 1e-9));
    const std::size_t n = std::max<std::size_t>(steps, 1);
    if (n > ctrl.max_steps) throw NumericError("rk4 would need " + std::to_string(n) + " steps (limit exceeded)");
    const double h = span / static_cast<double>(n);

    Solution sol;
    sol.method = Method::rk4;
    const std::size_t d = st.dim();
    State y = y0, k1(d), k2(d), k3(d), k4(d);
    st.eval(t0, y, k1);
    sol.t.push_back(t0);
    sol.y.push_back(y);
    sol.dy.push_back(k1);
    for (std::size_t s = 0; s < n; ++s) {
        const double t = t0 + static_cast<double>(s) * h;
        st.eval(t + 0.5 * h, st.axpy(y, 0.5 * h, {{1.0, &k1}}), k2);
        st.eval(t + 0.5 * h, st.axpy(y, 0.5 * h, {{1.0, &k2}}), k3);
        st.eval(t + h, st.axpy(y, h, {{1.0, &k3}}), k4);
        y = st.axpy(y, h / 6.0, {{1.0, &k1}, {2.0, &k2}, {2.0, &k3}, {1.0, &k4}});
        const double tn = (s + 1 == n) ? t1 : t0 + static_cast<double>(s + 1) * h;
        st.eval(tn, y, k1);
        sol.t.push_back(tn);
        sol.y.push_back(y);
        sol.dy.push_back(k1);
    }
    sol.steps = n;
    return sol;
}

Solution integrate_rk45(const Stepper& st, const State& y0, double t0, double t1, const IntegratorControl& ctrl) {
    if (!(ctrl.rtol > 0.0) || !(ctrl.atol > 0.0)) throw Error("rk45 needs positive tolerances");
    const double span = t1 - t0;
    const double h_min = 1e-14 * span;
    const std::size_t d = st.dim();

    Solution sol;
    sol.method = Method::rk45;
    State y = y0, k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d);
    st.eval(t0, y, k1);
    sol.t.push_back(t0);
    sol.y.push_back(y);
    sol.dy.push_back(k1);

    double h = ctrl.h > 0.0 ? ctrl.h : 0.0;
    if (h == 0.0) {
        // initial step from the derivative scale
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double sc = ctrl.atol + ctrl.rtol * std::fabs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / static_cast<double>(std::max<std::size_t>(d, 1)));
        d1 = std::sqrt(d1 / static_cast<double>(std::max<std::size_t>(d, 1)));
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    h = std::min({h, span, ctrl.h_max});

    double t = t0;
    double prev_err = 1e-4;
    constexpr double safety = 0.9, beta = 0.04, alpha = 0.2 - 0.75 * beta;
    std::size_t attempts = 0;
    while (t < t1) {
        if (++attempts > ctrl.max_steps) throw NumericError("rk45 exceeded the step limit at t = " + format_real(t));
        bool last = false;
        if (t + h >= t1 || t + 1.01 * h >= t1) {
            h = t1 - t;
            last = true;
        }
        State ynew, err(d);
        bool domain_fail = false;
        DomainExitError pending(t, "", "");
        try {
            st.eval(t + c2 * h, st.axpy(y, h, {{a21, &k1}}), k2);
            st.eval(t + c3 * h, st.axpy(y, h, {{a31, &k1}, {a32, &k2}}), k3);
            st.eval(t + c4 * h, st.axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), k4);
            st.eval(t + c5 * h, st.axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}), k5);
            st.eval(t + h, st.axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}), k6);
            ynew = st.axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
            st.eval(t + h, ynew, k7);
        } catch (const DomainExitError& e) {
            domain_fail = true;
            pending = e;
        }

        if (domain_fail) {
            // a trial stage left a curve domain: retry with a smaller step
            ++sol.rejected;
            h *= 0.25;
            if (h < h_min)
                throw DomainExitError(pending.time(), pending.element(), pending.what());
            continue;
        }

        double err_norm = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = ctrl.atol + ctrl.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err_norm += (e / sc) * (e / sc);
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(std::max<std::size_t>(d, 1)));

        if (err_norm <= 1.0) {
            t = last ? t1 : t + h;
            y = std::move(ynew);
            k1 = k7;
            sol.t.push_back(t);
            sol.y.push_back(y);
            sol.dy.push_back(k1);
            ++sol.steps;
            // PI controller
            double fac = err_norm == 0.0 ? 5.0
                                         : safety * std::pow(err_norm, -alpha) * std::pow(prev_err, beta);
            fac = std::clamp(fac, 0.2, 5.0);
            prev_err = std::max(err_norm, 1e-4);
            h = std::min(h * fac, ctrl.h_max);
        } else {
            ++sol.rejected;
            h *= std::max(0.2, safety * std::pow(err_norm, -alpha));
            if (h < h_min) throw NumericError("step underflow at t = " + format_real(t));
        }
    }
    return sol;
}

Solution resample(const Solution& sol, std::size_t points) {
    Solution out;
    out.method = sol.method;
    out.steps = sol.steps;
    out.rejected = sol.rejected;
    const double t0 = sol.t.front(), t1 = sol.t.back();
    for (std::size_t k = 0; k < points; ++k) {
        const double t = (k + 1 == points) ? t1 : t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
        out.t.push_back(t);
        out.y.push_back(sol.sample(t));
    }
    return out;
}

} // namespace

std::string_view method_name(Method m) noexcept { return m == Method::rk4 ? "rk4" : "rk45"; }

std::vector<double> Solution::sample(double tq) const {
    if (t.empty()) throw Error("empty solution");
    if (tq <= t.front()) return y.front();
    if (tq >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = t[k + 1] - t[k];
    const double s = (tq - t[k]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    std::vector<double> out(y[k].size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * y[k][i] + h10 * h * dy[k][i] + h01 * y[k + 1][i] + h11 * h * dy[k + 1][i];
    return out;
}

Solution integrate(const Rhs& f, std::span<const double> y0, double t0, double t1, const IntegratorControl& ctrl) {
    if (!(t1 > t0)) throw Error("integration span needs t1 > t0");
    for (double v : y0)
        if (!std::isfinite(v)) throw Error("initial state is not finite");
    const Stepper st(f, y0.size());
    const State init(y0.begin(), y0.end());
    Solution sol = ctrl.method == Method::rk4 ? integrate_rk4(st, init, t0, t1, ctrl) : integrate_rk45(st, init, t0, t1, ctrl);
    if (ctrl.dense_points >= 2) {
        sol = resample(sol, ctrl.dense_points);
        sol.dy.resize(sol.t.size());
        for (std::size_t k = 0; k < sol.t.size(); ++k) {
            sol.dy[k].assign(init.size(), 0.0);
            st.eval(sol.t[k], sol.y[k], sol.dy[k]);
        }
    }
    return sol;
}

} // namespace memlag
