#include "memlag/kernels.hpp"
#include "memlag/sim.hpp"

namespace memlag {

Trajectory simulate(const FirstOrderSystem& sys, const Vector& x0, const Vector& v0, double t0, double t1,
                    const IntegratorControl& ctrl) {
    const std::size_t n = sys.coords();
    if (static_cast<std::size_t>(x0.size()) != n || static_cast<std::size_t>(v0.size()) != n)
        throw Error("initial state has " + std::to_string(x0.size()) + " entries, system has " + std::to_string(n) +
                    " coordinates");
    const std::vector<double> y0 = sys.pack(x0, v0);
    const Rhs f = [&sys](double t, std::span<const double> y, std::span<double> dy) { sys.rhs(t, y, dy); };
    const Solution sol = integrate(f, y0, t0, t1, ctrl);

    Trajectory traj;
    traj.formulation = sys.system().formulation();
    traj.method = sol.method;
    traj.control = ctrl;
    traj.steps = sol.steps;
    traj.rejected = sol.rejected;
    traj.t = sol.t;
    const auto rows = static_cast<Eigen::Index>(sol.t.size());
    const auto cols = static_cast<Eigen::Index>(n);
    traj.x.resize(rows, cols);
    traj.v.resize(rows, cols);
    traj.a.resize(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        const Kinematics kin = sys.kinematics(sol.t[idx], sol.y[idx]);
        traj.x.row(k) = kin.x.transpose();
        traj.v.row(k) = kin.v.transpose();
        traj.a.row(k) = kin.a.transpose();
    }
    if (!traj.x.allFinite() || !traj.v.allFinite() || !traj.a.allFinite())
        throw NumericError("trajectory contains non-finite values");
    return traj;
}

double ikvl_residual(const LagrangianSystem& sys, const Trajectory& traj) {
    const auto n = static_cast<Eigen::Index>(sys.size());
    if (traj.x.cols() != n || traj.v.cols() != n || traj.a.cols() != n)
        throw Error("trajectory does not match the system size");
    std::vector<double> r;
    r.reserve(traj.points() * sys.size());
    for (std::size_t k = 0; k < traj.points(); ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const Vector res = sys.el_residual(traj.x.row(row).transpose(), traj.v.row(row).transpose(),
                                           traj.a.row(row).transpose(), traj.t[k]);
        r.insert(r.end(), res.data(), res.data() + res.size());
    }
    return kernels::max_abs(r);
}

} // namespace memlag
