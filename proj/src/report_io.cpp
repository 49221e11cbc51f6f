#include "memlag/report_io.hpp"

#include "memlag/format.hpp"

#include <json.hpp>

#include <ostream>

namespace memlag {

namespace {

using nlohmann::json;

json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

struct Column {
    std::string name;
    const std::vector<double>* data = nullptr;
};

std::vector<Column> element_columns(const ElementWaveforms& waves) {
    std::vector<Column> cols;
    for (const ElementSeries& s : waves.elements) {
        const std::pair<const char*, const std::vector<double>*> fields[] = {
            {"q", &s.q}, {"I", &s.I}, {"phi", &s.phi}, {"V", &s.V}, {"sigma", &s.sigma}, {"rho", &s.rho}};
        for (const auto& [label, data] : fields)
            if (!data->empty()) cols.push_back({s.name + "." + label, data});
    }
    return cols;
}

void write_units(std::ostream& os, Formulation f, bool with_coords) {
    os << "# units: t=s";
    if (with_coords) {
        if (f == Formulation::loop)
            os << " sigma=C*s sigma_dot=C sigma_ddot=A";
        else
            os << " rho=Wb*s rho_dot=Wb rho_ddot=V";
    }
    os << " q=C I=A phi=Wb V=V sigma=C*s rho=Wb*s\n";
}

void write_rows(std::ostream& os, const std::vector<double>& t, const std::vector<Column>& cols) {
    for (const Column& c : cols)
        if (c.data->size() != t.size()) throw Error("column " + c.name + " does not match the time grid");
    os << "t";
    for (const Column& c : cols) os << ',' << c.name;
    os << '\n';
    for (std::size_t k = 0; k < t.size(); ++k) {
        os << format_real17(t[k]);
        for (const Column& c : cols) os << ',' << format_real17((*c.data)[k]);
        os << '\n';
    }
}

} // namespace

std::string sa_report_json(const SAReport& report) {
    json j;
    j["verdict"] = report.self_adjoint ? "self_adjoint" : "not_self_adjoint";
    json conds = json::array();
    for (const ConditionResult& c : report.conditions) {
        json e;
        e["name"] = std::string(condition_name(c.condition));
        e["max_violation"] = c.max_violation;
        e["worst_point"] = {{"x", vector_json(c.worst_x)}, {"v", vector_json(c.worst_v)}};
        conds.push_back(std::move(e));
    }
    j["conditions"] = std::move(conds);
    j["samples"] = report.samples;
    j["tol"] = report.tol;
    return j.dump(2) + "\n";
}

std::string pinch_report_json(const PinchSummary& s) {
    json j;
    j["element"] = s.element;
    j["verdict"] = s.report.pinched ? "pinched" : "not_pinched";
    j["input"] = s.pair.u_name;
    j["output"] = s.pair.y_name;
    j["eps"] = s.report.eps;
    j["K"] = s.report.K;
    j["gated_points"] = s.report.gated_points;
    j["max_gated_output"] = s.report.max_gated_output;
    j["area_positive"] = s.report.area_positive;
    j["area_negative"] = s.report.area_negative;
    return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const ElementWaveforms& waves) {
    if (waves.t.size() != traj.points()) throw Error("waveforms do not match the trajectory grid");
    const std::string base = traj.formulation == Formulation::loop ? "sigma" : "rho";
    const std::size_t n = traj.coords();
    // coordinate columns copied out of the row-major views
    std::vector<std::vector<double>> store;
    std::vector<Column> cols;
    store.reserve(3 * n);
    const std::pair<const char*, const Matrix*> blocks[] = {{"", &traj.x}, {"_dot", &traj.v}, {"_ddot", &traj.a}};
    for (const auto& [suffix, m] : blocks) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto col = static_cast<Eigen::Index>(i);
            std::vector<double> c(traj.points());
            for (std::size_t k = 0; k < c.size(); ++k) c[k] = (*m)(static_cast<Eigen::Index>(k), col);
            store.push_back(std::move(c));
            cols.push_back({base + std::to_string(i + 1) + suffix, &store.back()});
        }
    }
    for (Column& c : element_columns(waves)) cols.push_back(std::move(c));
    write_units(os, traj.formulation, true);
    write_rows(os, traj.t, cols);
}

void write_waveforms_csv(std::ostream& os, const ElementWaveforms& waves) {
    write_units(os, waves.formulation, false);
    write_rows(os, waves.t, element_columns(waves));
}

} // namespace memlag
