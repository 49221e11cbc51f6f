#include "memlag/selfadjoint.hpp"

#include "memlag/errors.hpp"
#include "memlag/format.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace memlag {

namespace {

constexpr std::array<unsigned, 32> kPrimes = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                              59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::size_t index, unsigned base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

std::string point_text(const Vector& x, const Vector& v) {
    auto vec = [](const Vector& z) {
        std::string s = "[";
        for (Eigen::Index i = 0; i < z.size(); ++i) s += (i ? ", " : "") + format_real(z[i]);
        return s + "]";
    };
    return "x = " + vec(x) + ", v = " + vec(v);
}

class Evaluator {
public:
    Evaluator(const ABDecomposition& ab, double t) : ab_(ab), t_(t) {}

    Matrix A(const Vector& x, const Vector& v) const {
        Matrix m = ab_.A(x, v, t_);
        if (!m.allFinite()) throw NumericError("A is not finite at " + point_text(x, v));
        return m;
    }

    Vector B(const Vector& x, const Vector& v) const {
        Vector b = ab_.B(x, v, t_);
        if (!b.allFinite()) throw NumericError("B is not finite at " + point_text(x, v));
        return b;
    }

    /// Jacobian of B with respect to x (wrt_x) or v, column j = dB/dz_j.
    Matrix jacobian_B(const Vector& x, const Vector& v, bool wrt_x, double h_rel) const {
        const Eigen::Index n = x.size();
        Matrix J(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            Vector xp = x, xm = x, vp = v, vm = v;
            const double base = wrt_x ? x[j] : v[j];
            const double h = h_rel * (1.0 + std::fabs(base));
            if (wrt_x) {
                xp[j] += h;
                xm[j] -= h;
            } else {
                vp[j] += h;
                vm[j] -= h;
            }
            const double step = (wrt_x ? xp[j] - xm[j] : vp[j] - vm[j]);
            J.col(j) = (B(xp, vp) - B(xm, vm)) / step;
        }
        return J;
    }

    /// dA/dz_k for every k.
    std::vector<Matrix> grad_A(const Vector& x, const Vector& v, bool wrt_x, double h_rel) const {
        const Eigen::Index n = x.size();
        std::vector<Matrix> out;
        out.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) {
            Vector xp = x, xm = x, vp = v, vm = v;
            const double base = wrt_x ? x[k] : v[k];
            const double h = h_rel * (1.0 + std::fabs(base));
            if (wrt_x) {
                xp[k] += h;
                xm[k] -= h;
            } else {
                vp[k] += h;
                vm[k] -= h;
            }
            const double step = (wrt_x ? xp[k] - xm[k] : vp[k] - vm[k]);
            out.push_back((A(xp, vp) - A(xm, vm)) / step);
        }
        return out;
    }

private:
    const ABDecomposition& ab_;
    double t_;
};

} // namespace

Region Region::cube(std::size_t n, double lo, double hi) {
    const auto ni = static_cast<Eigen::Index>(n);
    return {Vector::Constant(ni, lo), Vector::Constant(ni, hi), Vector::Constant(ni, lo), Vector::Constant(ni, hi), 0.0};
}

std::string_view condition_name(SACondition c) noexcept {
    switch (c) {
    case SACondition::symmetry: return "symmetry";
    case SACondition::A_v_compatibility: return "A_v_compatibility";
    case SACondition::B_curl: return "B_curl";
    case SACondition::B_v_symmetry: return "B_v_symmetry";
    }
    return "?";
}

const ConditionResult& SAReport::worst() const {
    if (conditions.empty()) throw Error("empty self-adjointness report");
    return *std::max_element(conditions.begin(), conditions.end(), [](const ConditionResult& a, const ConditionResult& b) {
        return a.max_violation < b.max_violation;
    });
}

const ConditionResult& SAReport::result(SACondition c) const {
    for (const auto& r : conditions)
        if (r.condition == c) return r;
    throw Error("condition missing from report");
}

std::vector<double> halton_point(std::size_t index, std::size_t dim, std::uint64_t seed) {
    if (dim > kPrimes.size()) throw Error("Halton sampler supports at most " + std::to_string(kPrimes.size()) + " dimensions");
    std::vector<double> p(dim);
    for (std::size_t d = 0; d < dim; ++d) p[d] = radical_inverse(index, kPrimes[d]);
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (std::size_t d = 0; d < dim; ++d) {
            p[d] += u(rng);
            p[d] -= std::floor(p[d]);
        }
    }
    return p;
}

SAReport check_self_adjoint(const ABDecomposition& ab, const Region& region, const SAOptions& options) {
    if (options.samples < 1) throw Error("self-adjointness check needs at least one sample");
    if (!(options.tol > 0.0)) throw Error("self-adjointness tolerance must be positive");
    const auto n = static_cast<Eigen::Index>(ab.n);
    if (region.x_lo.size() != n || region.x_hi.size() != n || region.v_lo.size() != n || region.v_hi.size() != n)
        throw Error("region dimension does not match the system");

    SAReport report;
    report.samples = options.samples;
    report.tol = options.tol;
    for (SACondition c : kAllConditions) report.conditions.push_back({c, 0.0, Vector(), Vector()});

    const Evaluator ev(ab, region.t);
    auto record = [&](SACondition c, double violation, const Vector& x, const Vector& v) {
        auto& r = report.conditions[static_cast<std::size_t>(c)];
        if (r.worst_x.size() == 0 || violation > r.max_violation) {
            r.max_violation = violation;
            r.worst_x = x;
            r.worst_v = v;
        }
    };

    for (std::size_t s = 0; s < options.samples; ++s) {
        const auto p = halton_point(s + 1, static_cast<std::size_t>(2 * n), options.seed);
        Vector x(n), v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            x[i] = region.x_lo[i] + p[static_cast<std::size_t>(i)] * (region.x_hi[i] - region.x_lo[i]);
            v[i] = region.v_lo[i] + p[static_cast<std::size_t>(n + i)] * (region.v_hi[i] - region.v_lo[i]);
        }

        try {
            const Matrix A0 = ev.A(x, v);
            record(SACondition::symmetry, (A0 - A0.transpose()).cwiseAbs().maxCoeff(), x, v);

            const Matrix Jv = ev.jacobian_B(x, v, false, options.h_rel);
            const Matrix Jx = ev.jacobian_B(x, v, true, options.h_rel);
            const auto dA_dx = ev.grad_A(x, v, true, options.h_rel);

            // B_v_symmetry
            Matrix rhs4 = Matrix::Zero(n, n);
            for (Eigen::Index k = 0; k < n; ++k) rhs4 += 2.0 * dA_dx[static_cast<std::size_t>(k)] * v[k];
            record(SACondition::B_v_symmetry, (Jv + Jv.transpose() - rhs4).cwiseAbs().maxCoeff(), x, v);

            if (n > 1) {
                // A_v_compatibility
                const auto dA_dv = ev.grad_A(x, v, false, options.h_rel);
                double worst2 = 0.0;
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j)
                        for (Eigen::Index k = 0; k < n; ++k)
                            worst2 = std::max(worst2, std::fabs(dA_dv[static_cast<std::size_t>(j)](i, k) -
                                                                dA_dv[static_cast<std::size_t>(i)](j, k)));
                record(SACondition::A_v_compatibility, worst2, x, v);

                // B_curl: x-derivative of the antisymmetric part of the v-Jacobian
                Matrix rhs3 = Matrix::Zero(n, n);
                for (Eigen::Index k = 0; k < n; ++k) {
                    if (v[k] == 0.0) continue;
                    const double h2 = options.h2_rel * (1.0 + std::fabs(x[k]));
                    Vector xp = x, xm = x;
                    xp[k] += h2;
                    xm[k] -= h2;
                    const Matrix Jp = ev.jacobian_B(xp, v, false, options.h_rel);
                    const Matrix Jm = ev.jacobian_B(xm, v, false, options.h_rel);
                    const Matrix Wp = Jp - Jp.transpose();
                    const Matrix Wm = Jm - Jm.transpose();
                    rhs3 += 0.5 * ((Wp - Wm) / (xp[k] - xm[k])) * v[k];
                }
                const Matrix lhs3 = Jx - Jx.transpose();
                record(SACondition::B_curl, (lhs3 - rhs3).cwiseAbs().maxCoeff(), x, v);
            } else {
                record(SACondition::A_v_compatibility, 0.0, x, v);
                record(SACondition::B_curl, 0.0, x, v);
            }
        } catch (const DomainError& e) {
            throw DomainError(e.curve(), e.x(), std::string(e.what()) + " (self-adjointness sample at " + point_text(x, v) + ")");
        }
    }

    report.self_adjoint = std::all_of(report.conditions.begin(), report.conditions.end(),
                                      [&](const ConditionResult& r) { return r.max_violation <= options.tol; });
    return report;
}

Region default_region(const LagrangianSystem& system) {
    const std::size_t n = system.size();
    Vector rx = Vector::Ones(static_cast<Eigen::Index>(n));
    Vector rv = Vector::Ones(static_cast<Eigen::Index>(n));
    for (const auto& term : system.terms()) {
        const Interval d = term.curve.domain();
        const double reach = std::min(-d.lo, d.hi);
        if (!std::isfinite(reach)) continue;
        const double limit = 0.99 * reach / static_cast<double>(std::max<std::size_t>(term.members.size(), 1));
        const bool on_x = term.role == TermRole::potential || term.role == TermRole::path_kinetic;
        for (const auto& m : term.members) {
            auto& r = on_x ? rx : rv;
            r[m.coord] = std::min(r[m.coord], limit);
        }
    }
    return {-rx, rx, -rv, rv, 0.0};
}

} // namespace memlag
