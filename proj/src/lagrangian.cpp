#include "memlag/lagrangian.hpp"

#include "memlag/errors.hpp"

namespace memlag {

namespace {

double branch(const std::vector<Membership>& members, const Vector& z) {
    double s = 0.0;
    for (const auto& m : members) s += m.sign * z[m.coord];
    return s;
}

/// out_i += sign_i * value for every member coordinate
void scatter(const std::vector<Membership>& members, double value, Vector& out) {
    for (const auto& m : members) out[m.coord] += m.sign * value;
}

/// out_ij += sign_i sign_j value for every pair of members
void scatter_outer(const std::vector<Membership>& members, double value, Matrix& out) {
    for (const auto& a : members)
        for (const auto& b : members) out(a.coord, b.coord) += (a.sign * b.sign) * value;
}

std::vector<Membership> zero_based(const std::vector<Membership>& members) {
    std::vector<Membership> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back({m.coord - 1, m.sign});
    return out;
}

void require_formulation(const Circuit& circuit, Formulation want) {
    if (circuit.formulation != want)
        throw FormulationError("circuit '" + circuit.name + "' declares " +
                               std::string(formulation_token(circuit.formulation)) + " analysis; expected " +
                               std::string(formulation_token(want)));
    const Diagnostics d = validate(circuit);
    if (const Diagnostic* e = d.first_error()) throw FormulationError("circuit '" + circuit.name + "': " + e->message);
}

LagrangianSystem assemble(const Circuit& circuit) {
    const bool loop = circuit.formulation == Formulation::loop;
    std::vector<BranchTerm> terms;
    std::vector<SourceTerm> sources;
    for (const auto& e : circuit.elements) {
        const auto members = zero_based(e.members);
        auto linear = [&](double slope) { return ScalarCurve::linear(slope).with_label(e.name); };
        switch (e.kind) {
        case ElementKind::inductor:
            if (loop) terms.push_back({TermRole::kinetic, linear(e.value), members, e.name});
            else terms.push_back({TermRole::potential, linear(1.0 / e.value), members, e.name});
            break;
        case ElementKind::capacitor:
            if (loop) terms.push_back({TermRole::potential, linear(1.0 / e.value), members, e.name});
            else terms.push_back({TermRole::kinetic, linear(e.value), members, e.name});
            break;
        case ElementKind::resistor:
            terms.push_back({TermRole::dissipative, linear(loop ? e.value : 1.0 / e.value), members, e.name});
            break;
        case ElementKind::meminductor:
            terms.push_back({loop ? TermRole::kinetic : TermRole::potential, *e.curve, members, e.name});
            break;
        case ElementKind::memcapacitor:
            terms.push_back({loop ? TermRole::potential : TermRole::kinetic, *e.curve, members, e.name});
            break;
        case ElementKind::memristor:
            terms.push_back({TermRole::dissipative, *e.curve, members, e.name});
            break;
        case ElementKind::voltage_source:
        case ElementKind::current_source:
            sources.push_back({*e.source, members, e.name});
            break;
        }
    }
    return LagrangianSystem(circuit.formulation, static_cast<std::size_t>(circuit.n_coords), std::move(terms),
                            std::move(sources));
}

} // namespace

// =============================================================================
// LagrangianSystem
// =============================================================================

LagrangianSystem::LagrangianSystem(Formulation formulation, std::size_t n, std::vector<BranchTerm> terms,
                                   std::vector<SourceTerm> sources)
    : formulation_(formulation), n_(n), terms_(std::move(terms)), sources_(std::move(sources)), second_order_(n, false) {
    for (const auto& t : terms_) {
        for (const auto& m : t.members) {
            if (m.coord < 0 || static_cast<std::size_t>(m.coord) >= n_)
                throw FormulationError("term '" + t.element + "' references a coordinate outside the system");
            if (t.role == TermRole::kinetic || t.role == TermRole::path_kinetic) second_order_[m.coord] = true;
        }
    }
}

double LagrangianSystem::lagrangian(const Vector& x, const Vector& v, double t) const {
    double L = 0.0;
    for (const auto& term : terms_) {
        switch (term.role) {
        case TermRole::kinetic: L += term.curve.antideriv(branch(term.members, v)); break;
        case TermRole::potential: L -= term.curve.antideriv(branch(term.members, x)); break;
        case TermRole::path_kinetic: {
            const double vb = branch(term.members, v);
            L += 0.5 * term.curve.deriv(branch(term.members, x)) * vb * vb;
            break;
        }
        case TermRole::dissipative: break;
        }
    }
    for (const auto& s : sources_) L += branch(s.members, x) * s.waveform.integral(t);
    return L;
}

double LagrangianSystem::action(const Vector& v) const {
    double D = 0.0;
    for (const auto& term : terms_)
        if (term.role == TermRole::dissipative) D += term.curve.antideriv(branch(term.members, v));
    return D;
}

Vector LagrangianSystem::forcing(double t) const {
    Vector f = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (const auto& s : sources_) scatter(s.members, s.waveform.integral(t), f);
    return f;
}

Vector LagrangianSystem::forcing_rate(double t) const {
    Vector f = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (const auto& s : sources_) scatter(s.members, s.waveform.value(t), f);
    return f;
}

LagrangianSystem::Stored LagrangianSystem::stored(const Vector& x, const Vector& v) const {
    Stored s;
    for (const auto& term : terms_) {
        if (term.role == TermRole::kinetic) s.kinetic += term.curve.antideriv(branch(term.members, v));
        else if (term.role == TermRole::potential) s.potential += term.curve.antideriv(branch(term.members, x));
        else if (term.role == TermRole::path_kinetic) {
            const double vb = branch(term.members, v);
            s.kinetic += 0.5 * term.curve.deriv(branch(term.members, x)) * vb * vb;
        }
    }
    return s;
}

Vector LagrangianSystem::grad_x(const Vector& x, const Vector& v, double t) const {
    Vector g = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (const auto& term : terms_) {
        if (term.role == TermRole::potential) {
            scatter(term.members, -term.curve.eval(branch(term.members, x)), g);
        } else if (term.role == TermRole::path_kinetic) {
            const double vb = branch(term.members, v);
            scatter(term.members, 0.5 * term.curve.deriv2(branch(term.members, x)) * vb * vb, g);
        }
    }
    for (const auto& s : sources_) scatter(s.members, s.waveform.integral(t), g);
    return g;
}

Vector LagrangianSystem::grad_v(const Vector& x, const Vector& v) const {
    Vector g = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (const auto& term : terms_) {
        if (term.role == TermRole::kinetic) {
            scatter(term.members, term.curve.eval(branch(term.members, v)), g);
        } else if (term.role == TermRole::path_kinetic) {
            scatter(term.members, term.curve.deriv(branch(term.members, x)) * branch(term.members, v), g);
        }
    }
    return g;
}

Matrix LagrangianSystem::inertia(const Vector& x, const Vector& v) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix H = Matrix::Zero(n, n);
    for (const auto& term : terms_) {
        if (term.role == TermRole::kinetic) scatter_outer(term.members, term.curve.deriv(branch(term.members, v)), H);
        else if (term.role == TermRole::path_kinetic)
            scatter_outer(term.members, term.curve.deriv(branch(term.members, x)), H);
    }
    return H;
}

Matrix LagrangianSystem::mixed(const Vector& x, const Vector& v) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix M = Matrix::Zero(n, n);
    for (const auto& term : terms_) {
        if (term.role == TermRole::path_kinetic)
            scatter_outer(term.members, term.curve.deriv2(branch(term.members, x)) * branch(term.members, v), M);
    }
    return M;
}

Matrix LagrangianSystem::stiffness(const Vector& x) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix K = Matrix::Zero(n, n);
    for (const auto& term : terms_)
        if (term.role == TermRole::potential) scatter_outer(term.members, term.curve.deriv(branch(term.members, x)), K);
    return K;
}

Vector LagrangianSystem::action_grad(const Vector& v) const {
    Vector g = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (const auto& term : terms_)
        if (term.role == TermRole::dissipative) scatter(term.members, term.curve.eval(branch(term.members, v)), g);
    return g;
}

Matrix LagrangianSystem::action_hessian(const Vector& v) const {
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix H = Matrix::Zero(n, n);
    for (const auto& term : terms_)
        if (term.role == TermRole::dissipative)
            scatter_outer(term.members, term.curve.deriv(branch(term.members, v)), H);
    return H;
}

Vector LagrangianSystem::el_residual(const Vector& x, const Vector& v, const Vector& a, double t) const {
    // the Lagrangian has no explicit time dependence in its v-gradient
    return inertia(x, v) * a + mixed(x, v) * v - grad_x(x, v, t) + action_grad(v);
}

// =============================================================================
// Builders
// =============================================================================

LagrangianSystem build_loop_system(const Circuit& circuit) {
    require_formulation(circuit, Formulation::loop);
    return assemble(circuit);
}

LagrangianSystem build_node_system(const Circuit& circuit) {
    require_formulation(circuit, Formulation::node);
    return assemble(circuit);
}

LagrangianSystem build_system(const Circuit& circuit) {
    return circuit.formulation == Formulation::loop ? build_loop_system(circuit) : build_node_system(circuit);
}

LagrangianSystem naive_path_lagrangian(const Circuit& circuit) {
    if (circuit.formulation != Formulation::loop)
        throw FormulationError("the path Lagrangian is defined for loop circuits only");
    std::vector<BranchTerm> terms;
    for (const auto& e : circuit.elements) {
        const auto members = zero_based(e.members);
        switch (e.kind) {
        case ElementKind::meminductor:
            if (e.modulation != Modulation::charge)
                throw FormulationError("element '" + e.name + "': path Lagrangian needs a charge-modulated meminductor");
            terms.push_back({TermRole::path_kinetic, *e.curve, members, e.name});
            break;
        case ElementKind::inductor:
            terms.push_back({TermRole::kinetic, ScalarCurve::linear(e.value).with_label(e.name), members, e.name});
            break;
        case ElementKind::capacitor:
            terms.push_back({TermRole::potential, ScalarCurve::linear(1.0 / e.value).with_label(e.name), members, e.name});
            break;
        default:
            throw FormulationError("element '" + e.name + "': path Lagrangian supports meminductors, inductors and "
                                   "linear capacitors only, not a " + std::string(kind_name(e.kind)));
        }
    }
    return LagrangianSystem(Formulation::loop, static_cast<std::size_t>(circuit.n_coords), std::move(terms), {});
}

ABDecomposition extract_AB(const LagrangianSystem& system) {
    ABDecomposition ab;
    ab.n = system.size();
    // the residual is affine in the acceleration with slope equal to the
    // v-Hessian, so A is taken from it directly; B is the residual at a = 0
    ab.A = [system](const Vector& x, const Vector& v, double) { return system.inertia(x, v); };
    ab.B = [system](const Vector& x, const Vector& v, double t) {
        return system.el_residual(x, v, Vector::Zero(x.size()), t);
    };
    return ab;
}

} // namespace memlag
