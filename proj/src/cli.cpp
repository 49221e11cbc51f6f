#include "memlag/cli.hpp"

#include "memlag/format.hpp"
#include "memlag/report_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace memlag::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::vector<std::string> inputs;
    std::string out;
    // integrator
    double t0 = 0.0;
    double t1 = 10.0;
    std::string method = "rk45";
    double h = 1e-3;
    double rtol = 1e-8;
    double atol = 1e-10;
    std::size_t points = 0;
    std::string x0, v0;
    // self-adjointness
    std::string region;
    std::size_t samples = 512;
    double tol = 1e-6;
    std::size_t jobs = 1;
    // drive
    std::string element;
    std::string shape = "sin";
    double amp = 1.0;
    double omega = 1.0;
    double eps = 1e-3;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void validate_paths(const RunConfig& cfg) {
    for (const std::string& p : cfg.inputs)
        if (!std::filesystem::is_regular_file(p)) throw UsageError("input '" + p + "' is not a readable file");
    if (!cfg.out.empty()) {
        const auto parent = std::filesystem::path(cfg.out).parent_path();
        if (!parent.empty() && !std::filesystem::is_directory(parent))
            throw UsageError("output directory '" + parent.string() + "' does not exist");
    }
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
        }
    }
    return out;
}

IntegratorControl make_control(const RunConfig& cfg) {
    if (!(cfg.t1 > cfg.t0)) throw UsageError("--t1 must be greater than --t0");
    IntegratorControl c;
    if (cfg.method == "rk4") {
        c.method = Method::rk4;
        if (!(cfg.h > 0.0)) throw UsageError("--h must be positive");
    } else if (cfg.method == "rk45") {
        c.method = Method::rk45;
        if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) throw UsageError("--rtol and --atol must be positive");
    } else {
        throw UsageError("--method must be rk4 or rk45");
    }
    c.h = cfg.h;
    c.rtol = cfg.rtol;
    c.atol = cfg.atol;
    if (cfg.points == 1) throw UsageError("--points needs at least 2");
    c.dense_points = cfg.points;
    return c;
}

std::uint64_t seed_from_env() {
    const char* s = std::getenv("MEMLAG_SEED");
    if (!s || !*s) return 0;
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (errno != 0 || *end != '\0') throw UsageError(std::string("MEMLAG_SEED: '") + s + "' is not an unsigned integer");
    return v;
}

/// Writes to --out when given, otherwise to `fallback`.
template <typename Fn>
void emit(const RunConfig& cfg, std::ostream& fallback, Fn&& fn) {
    if (cfg.out.empty()) {
        fn(fallback);
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write '" + cfg.out + "'");
    fn(f);
    if (!f) throw UsageError("write to '" + cfg.out + "' failed");
}

void print_diagnostics(const std::string& path, const Diagnostics& diags, std::ostream& err) {
    for (const Diagnostic& d : diags.entries) {
        err << path;
        if (d.line > 0) err << ':' << d.line;
        err << ": " << (d.severity == Diagnostic::Severity::error ? "error" : "warning") << " [" << d.code << "] "
            << d.message << '\n';
    }
}

/// Parses and validates; returns nullopt after printing diagnostics on error.
std::optional<Circuit> load(const std::string& path, std::ostream& err) {
    const std::string text = read_file(path);
    Circuit c;
    try {
        c = parse(text);
    } catch (const ParseError& e) {
        err << path << ':' << e.line() << ':' << e.column() << ": error: " << e.message() << '\n';
        return std::nullopt;
    }
    const Diagnostics diags = validate(c);
    if (diags.has_errors()) {
        print_diagnostics(path, diags, err);
        return std::nullopt;
    }
    return c;
}

int cmd_parse(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string& path = cfg.inputs.front();
    Circuit c;
    try {
        c = parse(read_file(path));
    } catch (const ParseError& e) {
        err << path << ':' << e.line() << ':' << e.column() << ": error: " << e.message() << '\n';
        return invalid_input;
    }
    const Diagnostics diags = validate(c);
    emit(cfg, out, [&](std::ostream& os) { os << serialize(c); });
    print_diagnostics(path, diags, err);
    return diags.has_errors() ? invalid_input : ok;
}

Region region_for(const RunConfig& cfg, const LagrangianSystem& sys) {
    if (cfg.region.empty()) return default_region(sys);
    const std::vector<double> b = parse_list(cfg.region, "--region");
    if (b.size() != 2 || !(b[1] > b[0])) throw UsageError("--region expects 'lo,hi' with lo < hi");
    return Region::cube(sys.size(), b[0], b[1]);
}

int cmd_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.samples == 0) throw UsageError("--samples must be positive");
    if (!(cfg.tol > 0.0)) throw UsageError("--tol must be positive");
    if (cfg.jobs == 0) throw UsageError("--jobs must be positive");
    SAOptions opt;
    opt.samples = cfg.samples;
    opt.tol = cfg.tol;
    opt.seed = seed_from_env();

    const std::size_t n = cfg.inputs.size();
    std::vector<std::string> reports(n), errors(n);
    std::vector<int> codes(n, ok);
    auto work = [&](std::size_t i) {
        std::ostringstream e;
        try {
            const auto c = load(cfg.inputs[i], e);
            if (!c) {
                codes[i] = invalid_input;
            } else {
                const LagrangianSystem sys = build_system(*c);
                const Region region = region_for(cfg, sys);
                reports[i] = sa_report_json(check_self_adjoint(extract_AB(sys), region, opt));
            }
        } catch (const UsageError& ex) {
            e << "error: " << ex.what() << '\n';
            codes[i] = usage;
        } catch (const FormulationError& ex) {
            e << cfg.inputs[i] << ": error: " << ex.what() << '\n';
            codes[i] = invalid_input;
        } catch (const std::exception& ex) {
            e << cfg.inputs[i] << ": error: " << ex.what() << '\n';
            codes[i] = numeric;
        }
        errors[i] = e.str();
    };
    const std::size_t workers = std::min(cfg.jobs, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) work(i);
            });
        for (auto& t : pool) t.join();
    }

    int code = ok;
    for (std::size_t i = 0; i < n; ++i) {
        err << errors[i];
        code = std::max(code, codes[i]);
    }
    emit(cfg, out, [&](std::ostream& os) {
        if (n == 1) {
            os << reports[0];
            return;
        }
        os << "[\n";
        bool first = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (reports[i].empty()) continue;
            if (!first) os << ",\n";
            first = false;
            os << reports[i].substr(0, reports[i].size() - 1);
        }
        os << "\n]\n";
    });
    return code;
}

Vector initial_vector(const std::string& text, const char* flag, std::size_t n) {
    const std::vector<double> vals = parse_list(text, flag);
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    if (vals.empty()) return v;
    if (vals.size() != n)
        throw UsageError(std::string(flag) + " has " + std::to_string(vals.size()) + " entries, circuit has " +
                         std::to_string(n) + " coordinates");
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const IntegratorControl ctrl = make_control(cfg);
    const auto c = load(cfg.inputs.front(), err);
    if (!c) return invalid_input;
    const std::size_t n = static_cast<std::size_t>(c->n_coords);
    const Vector x0 = initial_vector(cfg.x0, "--x0", n);
    const Vector v0 = initial_vector(cfg.v0, "--v0", n);

    const LagrangianSystem sys = build_system(*c);
    const FirstOrderSystem fo = to_first_order(sys);
    const Trajectory traj = simulate(fo, x0, v0, cfg.t0, cfg.t1, ctrl);
    const ElementWaveforms waves = branch_waveforms(*c, traj);
    const double res = ikvl_residual(sys, traj);

    std::ostream& report = cfg.out.empty() ? err : out;
    emit(cfg, out, [&](std::ostream& os) { write_trajectory_csv(os, traj, waves); });
    report << "ikvl_residual " << format_real(res) << '\n';
    report << "steps " << traj.steps << " rejected " << traj.rejected << " points " << traj.points() << '\n';
    return ok;
}

int cmd_drive(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    RunConfig local = cfg;
    if (local.points == 0) local.points = 20001;
    const IntegratorControl ctrl = make_control(local);
    if (!(cfg.eps > 0.0)) throw UsageError("--eps must be positive");
    SourceWaveform drive;
    if (cfg.shape == "sin")
        drive = SourceWaveform::sine(cfg.amp, cfg.omega);
    else if (cfg.shape == "dc")
        drive = SourceWaveform::dc(cfg.amp);
    else
        throw UsageError("--shape must be sin or dc");

    const std::string& path = cfg.inputs.front();
    Circuit c;
    try {
        c = parse(read_file(path));
    } catch (const ParseError& e) {
        err << path << ':' << e.line() << ':' << e.column() << ": error: " << e.message() << '\n';
        return invalid_input;
    }
    const Element* chosen = nullptr;
    for (const Element& e : c.elements) {
        if (cfg.element.empty() ? !e.is_source() : e.name == cfg.element) {
            chosen = &e;
            break;
        }
    }
    if (!chosen) {
        err << path << ": error: "
            << (cfg.element.empty() ? std::string("no drivable element") : "no element named '" + cfg.element + "'")
            << '\n';
        return invalid_input;
    }
    if (chosen->is_source()) {
        err << path << ": error: element " << chosen->name << " is a source\n";
        return invalid_input;
    }

    const ElementWaveforms waves = drive_element(*chosen, drive, cfg.t0, cfg.t1, ctrl);
    PinchSummary summary;
    summary.element = chosen->name;
    summary.pair = hysteresis_pair(*chosen, waves.elements.front());
    summary.report = pinch_check(summary.pair.u, summary.pair.y, cfg.eps, summary.pair.K);

    std::ostream& report = cfg.out.empty() ? err : out;
    emit(cfg, out, [&](std::ostream& os) { write_waveforms_csv(os, waves); });
    report << pinch_report_json(summary);
    return ok;
}

void add_integrator_flags(CLI::App* app, RunConfig& cfg) {
    app->add_option("--t0", cfg.t0, "start time [s]");
    app->add_option("--t1", cfg.t1, "end time [s]");
    app->add_option("--method", cfg.method, "rk4 or rk45")->check(CLI::IsMember({"rk4", "rk45"}));
    app->add_option("--h", cfg.h, "rk4 step, rk45 initial step");
    app->add_option("--rtol", cfg.rtol, "rk45 relative tolerance");
    app->add_option("--atol", cfg.atol, "rk45 absolute tolerance");
    app->add_option("--points", cfg.points, "resample onto N uniform points");
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Integrated-variable Lagrangian circuit analysis"};
    app.name("memlag");
    // `--h` is the step size, so help is long-form only
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    auto* parse_cmd = app.add_subcommand("parse", "echo the canonical netlist and diagnostics");
    auto* check_cmd = app.add_subcommand("check", "self-adjointness report as JSON");
    auto* sim_cmd = app.add_subcommand("simulate", "integrate and write a CSV time series");
    auto* drive_cmd = app.add_subcommand("drive", "single-element hysteresis run");

    parse_cmd->add_option("file", cfg.inputs, "netlist")->required()->expected(1);
    parse_cmd->add_option("--out", cfg.out, "output path");

    check_cmd->add_option("files", cfg.inputs, "netlists")->required();
    check_cmd->add_option("--out", cfg.out, "output path");
    check_cmd->add_option("--region", cfg.region, "sample cube 'lo,hi' for x and v");
    check_cmd->add_option("--samples", cfg.samples, "sample points");
    check_cmd->add_option("--tol", cfg.tol, "violation tolerance");
    check_cmd->add_option("--jobs", cfg.jobs, "netlists checked concurrently");

    sim_cmd->add_option("file", cfg.inputs, "netlist")->required()->expected(1);
    sim_cmd->add_option("--out", cfg.out, "CSV output path");
    sim_cmd->add_option("--x0", cfg.x0, "initial coordinates, comma separated");
    sim_cmd->add_option("--v0", cfg.v0, "initial coordinate rates, comma separated");
    add_integrator_flags(sim_cmd, cfg);

    drive_cmd->add_option("file", cfg.inputs, "netlist holding the element")->required()->expected(1);
    drive_cmd->add_option("--out", cfg.out, "CSV output path");
    drive_cmd->add_option("--element", cfg.element, "element name (default: first non-source)");
    drive_cmd->add_option("--shape", cfg.shape, "sin or dc")->check(CLI::IsMember({"sin", "dc"}));
    drive_cmd->add_option("--amp", cfg.amp, "drive amplitude");
    drive_cmd->add_option("--omega", cfg.omega, "drive angular frequency [rad/s]");
    drive_cmd->add_option("--eps", cfg.eps, "pinch gate on the input");
    add_integrator_flags(drive_cmd, cfg);

    std::vector<const char*> argv{"memlag"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "memlag: " << e.what() << '\n';
        return usage;
    }

    try {
        validate_paths(cfg);
        if (parse_cmd->parsed()) return cmd_parse(cfg, out, err);
        if (check_cmd->parsed()) return cmd_check(cfg, out, err);
        if (sim_cmd->parsed()) return cmd_simulate(cfg, out, err);
        return cmd_drive(cfg, out, err);
    } catch (const UsageError& e) {
        err << "memlag: " << e.what() << '\n';
        return usage;
    } catch (const FormulationError& e) {
        err << "memlag: " << e.what() << '\n';
        return invalid_input;
    } catch (const DomainExitError& e) {
        err << "memlag: " << e.what() << '\n';
        return numeric;
    } catch (const std::exception& e) {
        err << "memlag: " << e.what() << '\n';
        return numeric;
    }
}

} // namespace memlag::cli
