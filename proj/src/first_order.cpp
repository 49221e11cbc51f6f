#include "memlag/first_order.hpp"

#include "memlag/errors.hpp"
#include "memlag/format.hpp"

#include <cmath>

namespace memlag {

namespace {

constexpr double kAlgebraicTol = 1e-12;
constexpr double kMaxCondition = 1e12;

Matrix sub(const Matrix& m, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    return out;
}

Vector gather(const Vector& v, const std::vector<std::size_t>& idx) {
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
    return out;
}

std::string coord_list(const std::vector<std::size_t>& idx) {
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i] + 1);
    return s;
}

} // namespace

FirstOrderSystem::FirstOrderSystem(LagrangianSystem system) : system_(std::move(system)) {
    const auto& mask = system_.second_order_mask();
    for (std::size_t i = 0; i < mask.size(); ++i) (mask[i] ? second_ : first_).push_back(i);

    for (std::size_t f : first_) {
        bool damped = false;
        for (const auto& term : system_.terms()) {
            if (term.role != TermRole::dissipative) continue;
            for (const auto& m : term.members) damped = damped || static_cast<std::size_t>(m.coord) == f;
        }
        if (!damped)
            throw NumericError("algebraic row unsolvable: coordinate " + std::to_string(f + 1) +
                               " has neither inertia nor velocity dependence");
    }

    // structural degeneracy shows up already at the origin
    if (!second_.empty()) {
        const auto n = static_cast<Eigen::Index>(system_.size());
        try {
            (void)second_order_accel(Vector::Zero(n), Vector::Zero(n), 0.0);
        } catch (const DomainError&) {
        }
    }
}

std::vector<double> FirstOrderSystem::pack(const Vector& x0, const Vector& v0) const {
    const std::size_t n = system_.size();
    if (static_cast<std::size_t>(x0.size()) != n || static_cast<std::size_t>(v0.size()) != n)
        throw Error("initial state has the wrong number of coordinates (expected " + std::to_string(n) + ")");
    std::vector<double> y(state_dim());
    for (std::size_t i = 0; i < n; ++i) y[i] = x0[static_cast<Eigen::Index>(i)];
    for (std::size_t k = 0; k < second_.size(); ++k) y[n + k] = v0[static_cast<Eigen::Index>(second_[k])];
    return y;
}

void FirstOrderSystem::solve_algebraic(const Vector& x, Vector& v, double t) const {
    if (first_.empty()) return;
    const Vector target = gather(system_.grad_x(x, v, t), first_);
    const double tol = kAlgebraicTol * (1.0 + target.cwiseAbs().maxCoeff());

    auto residual = [&](const Vector& vv) { return Vector(gather(system_.action_grad(vv), first_) - target); };
    auto set_first = [&](Vector& vv, const Vector& vf) {
        for (std::size_t i = 0; i < first_.size(); ++i)
            vv[static_cast<Eigen::Index>(first_[i])] = vf[static_cast<Eigen::Index>(i)];
    };

    Vector vf = Vector::Zero(static_cast<Eigen::Index>(first_.size()));
    set_first(v, vf);
    Vector g = residual(v);
    bool converged = g.cwiseAbs().maxCoeff() <= tol;
    for (int iter = 0; iter < 100 && !converged; ++iter) {
        const Matrix J = sub(system_.action_hessian(v), first_, first_);
        const Vector step = J.ldlt().solve(-g);
        if (!step.allFinite()) break;
        const double gnorm = g.norm();
        bool accepted = false;
        double lambda = 1.0;
        for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
            Vector trial = v;
            set_first(trial, vf + lambda * step);
            Vector gt;
            try {
                gt = residual(trial);
            } catch (const DomainError&) {
                continue;
            }
            if (gt.allFinite() && gt.norm() <= (1.0 - 1e-4 * lambda) * gnorm) {
                vf += lambda * step;
                v = trial;
                g = gt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        converged = g.cwiseAbs().maxCoeff() <= tol;
        if (!converged && (lambda * step).cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + vf.cwiseAbs().maxCoeff())) break;
    }
    if (converged) return;

    if (first_.size() == 1) {
        // The row is increasing in its velocity; bracket and bisect.
        auto g1 = [&](double s) {
            Vector vv = v;
            vv[static_cast<Eigen::Index>(first_[0])] = s;
            return residual(vv)[0];
        };
        double lo = -1.0, hi = 1.0;
        try {
            for (int k = 0; k < 200 && g1(lo) > 0.0; ++k) lo *= 2.0;
            for (int k = 0; k < 200 && g1(hi) < 0.0; ++k) hi *= 2.0;
            if (g1(lo) <= 0.0 && g1(hi) >= 0.0) {
                double mid = 0.5 * (lo + hi);
                for (int k = 0; k < 400; ++k) {
                    mid = 0.5 * (lo + hi);
                    const double gm = g1(mid);
                    if (std::fabs(gm) <= tol) break;
                    (gm > 0.0 ? hi : lo) = mid;
                    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(mid))) break;
                }
                v[static_cast<Eigen::Index>(first_[0])] = mid;
                if (std::fabs(g1(mid)) <= 1e3 * tol) return;
            }
        } catch (const DomainError&) {
        }
    }
    throw NumericError("algebraic row unsolvable: coordinates " + coord_list(first_) + " at t = " + format_real(t) +
                       " (residual " + format_real(g.cwiseAbs().maxCoeff()) + ")");
}

Vector FirstOrderSystem::second_order_accel(const Vector& x, const Vector& v, double t) const {
    const auto n = static_cast<Eigen::Index>(system_.size());
    const Vector B = system_.el_residual(x, v, Vector::Zero(n), t);
    const Matrix Hs = sub(system_.inertia(x, v), second_, second_);
    Eigen::JacobiSVD<Matrix> svd(Hs);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv.maxCoeff() : 0.0;
    const double smin = sv.size() ? sv.minCoeff() : 0.0;
    if (!(smin > 0.0) || smax / smin > kMaxCondition)
        throw NumericError("degenerate inertia on coordinates " + coord_list(second_) + " (condition number " +
                           (smin > 0.0 ? format_real(smax / smin) : std::string("inf")) + ")");
    return Hs.ldlt().solve(-gather(B, second_));
}

Kinematics FirstOrderSystem::kinematics(double t, std::span<const double> y) const {
    const std::size_t n = system_.size();
    const auto ni = static_cast<Eigen::Index>(n);
    Kinematics k{Vector(ni), Vector::Zero(ni), Vector::Zero(ni)};
    for (std::size_t i = 0; i < n; ++i) k.x[static_cast<Eigen::Index>(i)] = y[i];
    for (std::size_t s = 0; s < second_.size(); ++s) k.v[static_cast<Eigen::Index>(second_[s])] = y[n + s];
    solve_algebraic(k.x, k.v, t);

    if (!second_.empty()) {
        const Vector as = second_order_accel(k.x, k.v, t);
        for (std::size_t s = 0; s < second_.size(); ++s)
            k.a[static_cast<Eigen::Index>(second_[s])] = as[static_cast<Eigen::Index>(s)];
    }
    if (!first_.empty()) {
        // differentiate the algebraic rows once in time:
        // J_FF a_F + J_FS a_S + K_F. v - rate_F = 0
        const Matrix J = system_.action_hessian(k.v);
        const Matrix K = system_.stiffness(k.x);
        const Vector rate = system_.forcing_rate(t);
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        Vector rhs = -(sub(K, first_, all) * k.v) + gather(rate, first_);
        if (!second_.empty()) rhs -= sub(J, first_, second_) * gather(k.a, second_);
        const Vector af = sub(J, first_, first_).ldlt().solve(rhs);
        for (std::size_t f = 0; f < first_.size(); ++f)
            k.a[static_cast<Eigen::Index>(first_[f])] = af[static_cast<Eigen::Index>(f)];
    }
    return k;
}

void FirstOrderSystem::rhs(double t, std::span<const double> y, std::span<double> dydt) const {
    const std::size_t n = system_.size();
    const auto ni = static_cast<Eigen::Index>(n);
    Vector x(ni), v = Vector::Zero(ni);
    for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = y[i];
    for (std::size_t s = 0; s < second_.size(); ++s) v[static_cast<Eigen::Index>(second_[s])] = y[n + s];
    solve_algebraic(x, v, t);
    for (std::size_t i = 0; i < n; ++i) dydt[i] = v[static_cast<Eigen::Index>(i)];
    if (!second_.empty()) {
        const Vector as = second_order_accel(x, v, t);
        for (std::size_t s = 0; s < second_.size(); ++s) dydt[n + s] = as[static_cast<Eigen::Index>(s)];
    }
}

FirstOrderSystem to_first_order(const LagrangianSystem& system) { return FirstOrderSystem(system); }

} // namespace memlag
