#include "memlag/netlist.hpp"

#include "memlag/errors.hpp"
#include "memlag/format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <tuple>

namespace memlag {

namespace {

// =============================================================================
// Tokenizer
// =============================================================================

struct Token {
    std::string text;
    int column = 0;  // 1-based
    bool quoted = false;
};

/// Error at a character offset inside some token; converted to a located
/// ParseError by the caller.
struct LocalError {
    std::size_t offset;
    std::string message;
};

std::vector<Token> tokenize(std::string_view line, int line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        const char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.column = static_cast<int>(i) + 1;
        if (c == '"') {
            tok.quoted = true;
            ++i;
            bool closed = false;
            while (i < n) {
                if (line[i] == '\\' && i + 1 < n) {
                    tok.text.push_back(line[i + 1]);
                    i += 2;
                    continue;
                }
                if (line[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                tok.text.push_back(line[i++]);
            }
            if (!closed) throw ParseError(line_no, tok.column, "unterminated string");
            out.push_back(std::move(tok));
            continue;
        }
        int depth = 0;
        while (i < n) {
            const char d = line[i];
            if (depth == 0 && (std::isspace(static_cast<unsigned char>(d)) || d == '#')) break;
            if (d == '(' || d == '[') ++depth;
            if (d == ')' || d == ']') {
                if (--depth < 0) throw ParseError(line_no, static_cast<int>(i) + 1, "unbalanced closing bracket");
            }
            if (depth > 0 && d == '#') throw ParseError(line_no, static_cast<int>(i) + 1, "comment inside brackets");
            tok.text.push_back(d);
            ++i;
        }
        if (depth != 0) throw ParseError(line_no, tok.column, "unbalanced brackets in '" + tok.text + "'");
        out.push_back(std::move(tok));
    }
    return out;
}

// =============================================================================
// Literal cursor (reals, curve literals, domains)
// =============================================================================

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c)
            throw LocalError{pos_, std::string("expected '") + c + "'"};
        ++pos_;
    }

    bool accept(std::string_view word) {
        skip_ws();
        if (s_.substr(pos_, word.size()) == word) {
            pos_ += word.size();
            return true;
        }
        return false;
    }

    double real() {
        skip_ws();
        const std::size_t start = pos_;
        std::size_t p = pos_;
        if (p < s_.size() && s_[p] == '+') ++p;
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + p, s_.data() + s_.size(), v);
        if (res.ec != std::errc() || res.ptr == s_.data() + p) throw LocalError{start, "expected a real number"};
        if (!std::isfinite(v)) throw LocalError{start, "real number must be finite"};
        pos_ = static_cast<std::size_t>(res.ptr - s_.data());
        return v;
    }

    void expect_end() {
        skip_ws();
        if (pos_ != s_.size()) throw LocalError{pos_, "unexpected trailing text"};
    }

    [[nodiscard]] std::size_t pos() const { return pos_; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

double parse_real_text(std::string_view text) {
    Cursor c(text);
    const double v = c.real();
    c.expect_end();
    return v;
}

struct CurveLiteral {
    bool is_poly = true;
    std::vector<double> coeffs;
    std::vector<ScalarCurve::Point> points;
};

CurveLiteral parse_curve_literal(std::string_view text) {
    Cursor c(text);
    CurveLiteral lit;
    if (c.accept("poly")) {
        lit.is_poly = true;
        c.expect('(');
        lit.coeffs.push_back(c.real());
        while (c.peek(',')) {
            c.expect(',');
            lit.coeffs.push_back(c.real());
        }
        c.expect(')');
    } else if (c.accept("pwl")) {
        lit.is_poly = false;
        c.expect('(');
        do {
            if (!lit.points.empty()) c.expect(',');
            c.expect('(');
            const double x = c.real();
            c.expect(',');
            const double y = c.real();
            c.expect(')');
            lit.points.push_back({x, y});
        } while (c.peek(','));
        c.expect(')');
    } else {
        throw LocalError{0, "malformed curve literal: expected poly(...) or pwl(...)"};
    }
    c.expect_end();
    return lit;
}

Interval parse_domain_literal(std::string_view text) {
    Cursor c(text);
    c.expect('[');
    const double lo = c.real();
    c.expect(',');
    const double hi = c.real();
    c.expect(']');
    c.expect_end();
    return {lo, hi};
}

ScalarCurve build_curve(const CurveLiteral& lit, std::optional<Interval> domain) {
    if (lit.is_poly) return ScalarCurve::polynomial(lit.coeffs, domain);
    return ScalarCurve::piecewise_linear(lit.points, domain);
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '-';
    });
}

std::optional<ElementKind> kind_from_token(std::string_view t) {
    static const std::map<std::string_view, ElementKind> kinds = {
        {"R", ElementKind::resistor},          {"L", ElementKind::inductor},
        {"C", ElementKind::capacitor},         {"MR", ElementKind::memristor},
        {"ML", ElementKind::meminductor},      {"MC", ElementKind::memcapacitor},
        {"VSRC", ElementKind::voltage_source}, {"ISRC", ElementKind::current_source},
    };
    const auto it = kinds.find(t);
    if (it == kinds.end()) return std::nullopt;
    return it->second;
}

std::optional<Modulation> modulation_from_token(std::string_view t) {
    if (t == "q") return Modulation::charge;
    if (t == "phi") return Modulation::flux;
    if (t == "rho") return Modulation::integrated_flux;
    if (t == "sigma") return Modulation::integrated_charge;
    return std::nullopt;
}

// =============================================================================
// Line parsers
// =============================================================================

struct Header {
    std::string name;
    Formulation formulation;
    int n_coords;
};

int parse_int(const Token& t, int line_no) {
    int v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
        throw ParseError(line_no, t.column, "expected an integer, got '" + t.text + "'");
    return v;
}

Header parse_header(const std::vector<Token>& toks, int line_no) {
    if (toks.empty() || toks[0].text != "circuit" || toks[0].quoted)
        throw ParseError(line_no, toks.empty() ? 1 : toks[0].column, "expected header 'circuit \"name\" formulation ... coords N'");
    auto at = [&](std::size_t i, std::string_view what) -> const Token& {
        if (i >= toks.size()) {
            const auto& last = toks.back();
            throw ParseError(line_no, last.column + static_cast<int>(last.text.size()),
                             "header ends early: expected " + std::string(what));
        }
        return toks[i];
    };
    Header h;
    const Token& name = at(1, "circuit name string");
    if (!name.quoted) throw ParseError(line_no, name.column, "circuit name must be a quoted string");
    h.name = name.text;
    const Token& kw = at(2, "'formulation'");
    if (kw.text != "formulation") throw ParseError(line_no, kw.column, "expected 'formulation', got '" + kw.text + "'");
    const Token& form = at(3, "'loop' or 'node'");
    if (form.text == "loop") h.formulation = Formulation::loop;
    else if (form.text == "node") h.formulation = Formulation::node;
    else throw ParseError(line_no, form.column, "formulation must be 'loop' or 'node', got '" + form.text + "'");
    const Token& ckw = at(4, "'coords'");
    if (ckw.text != "coords") throw ParseError(line_no, ckw.column, "expected 'coords', got '" + ckw.text + "'");
    const Token& count = at(5, "coordinate count");
    h.n_coords = parse_int(count, line_no);
    if (h.n_coords < 1) throw ParseError(line_no, count.column, "coordinate count must be positive");
    if (toks.size() > 6) throw ParseError(line_no, toks[6].column, "unexpected token '" + toks[6].text + "' after header");
    return h;
}

Element parse_element(const std::vector<Token>& toks, int line_no, int n_coords) {
    auto fail = [&](const Token& t, const std::string& msg) -> ParseError { return ParseError(line_no, t.column, msg); };
    if (toks.size() < 2) throw fail(toks[0], "element line needs a name");
    const Token& name = toks[1];
    if (name.quoted || !is_identifier(name.text)) throw fail(name, "invalid element name '" + name.text + "'");
    if (toks.size() < 3) throw fail(name, "element '" + name.text + "' needs a kind");
    const Token& kind_tok = toks[2];
    const auto kind = kind_from_token(kind_tok.text);
    if (!kind) throw fail(kind_tok, "unknown element kind '" + kind_tok.text + "'");

    // key=value parameters up to the 'coords' keyword
    std::size_t i = 3;
    std::map<std::string, const Token*> params;
    for (; i < toks.size() && toks[i].text != "coords"; ++i) {
        const Token& t = toks[i];
        const auto eq = t.text.find('=');
        if (t.quoted || eq == std::string::npos || eq == 0)
            throw fail(t, "expected key=value parameter or 'coords', got '" + t.text + "'");
        const std::string key = t.text.substr(0, eq);
        if (params.count(key)) throw fail(t, "duplicate parameter '" + key + "'");
        params[key] = &t;
    }
    if (i >= toks.size()) {
        const auto& last = toks.back();
        throw ParseError(line_no, last.column + static_cast<int>(last.text.size()),
                         "element '" + name.text + "' is missing its 'coords' membership list");
    }
    const Token& coords_kw = toks[i++];
    if (i >= toks.size()) throw fail(coords_kw, "membership list is empty");

    std::vector<Membership> members;
    std::set<int> seen;
    for (; i < toks.size(); ++i) {
        const Token& t = toks[i];
        std::string_view s = t.text;
        int sign = 1;
        if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
            sign = s[0] == '-' ? -1 : 1;
            s.remove_prefix(1);
        }
        int idx = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), idx);
        if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw fail(t, "expected a signed coordinate index, got '" + t.text + "'");
        if (idx < 1 || idx > n_coords)
            throw fail(t, "coordinate " + std::to_string(idx) + " outside [1, " + std::to_string(n_coords) + "]");
        if (!seen.insert(idx).second) throw fail(t, "coordinate " + std::to_string(idx) + " listed twice");
        members.push_back({idx, sign});
    }

    auto value_of = [&](const Token& t) { return std::string_view(t.text).substr(t.text.find('=') + 1); };
    auto value_col = [&](const Token& t) { return t.column + static_cast<int>(t.text.find('=')) + 1; };
    auto real_param = [&](const std::string& key) -> double {
        const Token& t = *params.at(key);
        try {
            return parse_real_text(value_of(t));
        } catch (const LocalError& e) {
            throw ParseError(line_no, value_col(t) + static_cast<int>(e.offset), e.message + " for '" + key + "'");
        }
    };
    auto require = [&](std::initializer_list<const char*> required, std::initializer_list<const char*> optional) {
        for (const char* k : required)
            if (!params.count(k))
                throw fail(kind_tok, "element '" + name.text + "' (" + kind_tok.text + ") needs parameter '" + k + "='");
        for (const auto& [k, t] : params) {
            const bool known = std::any_of(required.begin(), required.end(), [&](const char* r) { return k == r; }) ||
                               std::any_of(optional.begin(), optional.end(), [&](const char* r) { return k == r; });
            if (!known) throw fail(*t, "unknown parameter '" + k + "' for " + kind_tok.text);
        }
    };

    try {
        Element e;
        switch (*kind) {
        case ElementKind::resistor:
        case ElementKind::inductor:
        case ElementKind::capacitor: {
            require({"value"}, {});
            const double v = real_param("value");
            if (!(v > 0.0)) throw fail(*params.at("value"), "value must be strictly positive");
            e = make_linear(name.text, *kind, v, members);
            break;
        }
        case ElementKind::memristor:
        case ElementKind::meminductor:
        case ElementKind::memcapacitor: {
            require({"curve", "mod"}, {"domain"});
            const Token& mod_tok = *params.at("mod");
            const auto mod = modulation_from_token(value_of(mod_tok));
            if (!mod) throw fail(mod_tok, "unknown modulation '" + std::string(value_of(mod_tok)) + "'");
            if (!modulation_allowed(*kind, *mod))
                throw fail(mod_tok, "modulation '" + std::string(value_of(mod_tok)) + "' is not defined for a " +
                                        std::string(kind_name(*kind)));
            std::optional<Interval> domain;
            if (params.count("domain")) {
                const Token& t = *params.at("domain");
                try {
                    domain = parse_domain_literal(value_of(t));
                } catch (const LocalError& le) {
                    throw ParseError(line_no, value_col(t) + static_cast<int>(le.offset), "malformed domain: " + le.message);
                }
            }
            const Token& ct = *params.at("curve");
            CurveLiteral lit;
            try {
                lit = parse_curve_literal(value_of(ct));
            } catch (const LocalError& le) {
                throw ParseError(line_no, value_col(ct) + static_cast<int>(le.offset),
                                 "malformed curve literal: " + le.message);
            }
            try {
                e = make_memory(name.text, *kind, *mod, build_curve(lit, domain), members);
            } catch (const DefinitionError& de) {
                throw ParseError(line_no, value_col(ct), std::string("invalid curve: ") + de.what());
            }
            break;
        }
        case ElementKind::voltage_source:
        case ElementKind::current_source: {
            require({"shape", "amp"}, {"omega", "phase"});
            const Token& shape_tok = *params.at("shape");
            const std::string_view shape = value_of(shape_tok);
            const double amp = real_param("amp");
            if (shape == "dc") {
                if (params.count("omega") || params.count("phase"))
                    throw fail(shape_tok, "dc source takes no omega/phase");
                e = make_source(name.text, *kind, SourceWaveform::dc(amp), members);
            } else if (shape == "sin") {
                if (!params.count("omega")) throw fail(shape_tok, "sin source needs 'omega='");
                const double omega = real_param("omega");
                const double phase = params.count("phase") ? real_param("phase") : 0.0;
                if (!(omega > 0.0)) throw fail(*params.at("omega"), "omega must be strictly positive");
                e = make_source(name.text, *kind, SourceWaveform::sine(amp, omega, phase), members);
            } else {
                throw fail(shape_tok, "shape must be 'dc' or 'sin', got '" + std::string(shape) + "'");
            }
            break;
        }
        }
        e.line = line_no;
        return e;
    } catch (const DefinitionError& de) {
        throw ParseError(line_no, name.column, de.what());
    }
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

// =============================================================================
// Public API
// =============================================================================

bool Diagnostics::has_errors() const noexcept { return first_error() != nullptr; }

std::size_t Diagnostics::error_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const Diagnostic& d) {
        return d.severity == Diagnostic::Severity::error;
    }));
}

const Diagnostic* Diagnostics::first_error() const noexcept {
    for (const auto& d : entries)
        if (d.severity == Diagnostic::Severity::error) return &d;
    return nullptr;
}

std::string_view formulation_token(Formulation f) noexcept { return f == Formulation::loop ? "loop" : "node"; }

bool is_inertial(ElementKind kind, Formulation f) noexcept {
    if (f == Formulation::loop) return kind == ElementKind::inductor || kind == ElementKind::meminductor;
    return kind == ElementKind::capacitor || kind == ElementKind::memcapacitor;
}

bool is_dissipative(ElementKind kind) noexcept {
    return kind == ElementKind::resistor || kind == ElementKind::memristor;
}

Circuit parse(std::string_view text) {
    Circuit circuit;
    bool have_header = false;
    int header_line = 0;
    int line_no = 0;
    std::set<std::string> names;

    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        start = end + 1;

        const auto toks = tokenize(line, line_no);
        if (toks.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (!have_header) {
            const Header h = parse_header(toks, line_no);
            circuit.name = h.name;
            circuit.formulation = h.formulation;
            circuit.n_coords = h.n_coords;
            have_header = true;
            header_line = line_no;
        } else if (toks[0].text == "element" && !toks[0].quoted) {
            Element e = parse_element(toks, line_no, circuit.n_coords);
            if (!names.insert(e.name).second)
                throw ParseError(line_no, toks[1].column, "duplicate element name '" + e.name + "'");
            circuit.elements.push_back(std::move(e));
        } else if (toks[0].text == "circuit" && !toks[0].quoted) {
            throw ParseError(line_no, toks[0].column, "second circuit header");
        } else {
            throw ParseError(line_no, toks[0].column, "expected 'element', got '" + toks[0].text + "'");
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw ParseError(std::max(line_no, 1), 1, "missing circuit header");
    if (circuit.elements.empty()) throw ParseError(header_line, 1, "circuit has no elements");
    return circuit;
}

Diagnostics validate(const Circuit& circuit) {
    using Sev = Diagnostic::Severity;
    Diagnostics diags;
    const Formulation f = circuit.formulation;
    auto add = [&](Sev sev, std::string code, std::string msg, int line) {
        diags.entries.push_back({sev, std::move(code), std::move(msg), line});
    };

    for (const auto& e : circuit.elements) {
        if (e.is_memory()) {
            const Modulation m = e.modulation;
            const bool loop_ok = (e.kind == ElementKind::memristor && m == Modulation::charge) ||
                                 (e.kind == ElementKind::meminductor && m == Modulation::charge) ||
                                 (e.kind == ElementKind::memcapacitor && m == Modulation::integrated_charge);
            if (f == Formulation::loop && !loop_ok)
                add(Sev::error, "modulation-formulation", "element " + e.name + ": modulation requires node analysis", e.line);
            if (f == Formulation::node && loop_ok)
                add(Sev::error, "modulation-formulation", "element " + e.name + ": modulation requires loop analysis", e.line);
        }
        if (e.kind == ElementKind::voltage_source && f == Formulation::node)
            add(Sev::error, "source-formulation", "element " + e.name + ": voltage source requires loop analysis", e.line);
        if (e.kind == ElementKind::current_source && f == Formulation::loop)
            add(Sev::error, "source-formulation", "element " + e.name + ": current source requires node analysis", e.line);
    }

    for (int k = 1; k <= circuit.n_coords; ++k) {
        bool inertial = false, dissipative = false;
        int line = 0;
        for (const auto& e : circuit.elements) {
            const bool touches = std::any_of(e.members.begin(), e.members.end(), [k](const Membership& m) { return m.coord == k; });
            if (!touches) continue;
            inertial = inertial || is_inertial(e.kind, f);
            dissipative = dissipative || is_dissipative(e.kind);
            line = line == 0 ? e.line : std::min(line, e.line);
        }
        const std::string tag = "coordinate " + std::to_string(k);
        if (!inertial && !dissipative)
            add(Sev::error, "coordinate-order", "coordinate has no inertial or dissipative element (" + tag + ")", line);
        else if (!inertial)
            add(Sev::warning, "first-order", tag + " is first-order", line);
    }

    std::stable_sort(diags.entries.begin(), diags.entries.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.severity, a.code, a.message) < std::tie(b.severity, b.code, b.message);
    });
    return diags;
}

std::string serialize_curve(const ScalarCurve& curve) {
    std::string out;
    if (curve.kind() == ScalarCurve::Kind::polynomial) {
        out = "poly(";
        const auto c = curve.coefficients();
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k) out += ",";
            out += format_real(c[k]);
        }
        out += ")";
        if (!(curve.domain() == kDefaultPolyDomain))
            out += " domain=[" + format_real(curve.domain().lo) + "," + format_real(curve.domain().hi) + "]";
        return out;
    }
    out = "pwl(";
    const auto pts = curve.points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k) out += ",";
        out += "(" + format_real(pts[k].x) + "," + format_real(pts[k].y) + ")";
    }
    out += ")";
    if (!(curve.domain() == Interval{pts.front().x, pts.back().x}))
        out += " domain=[" + format_real(curve.domain().lo) + "," + format_real(curve.domain().hi) + "]";
    return out;
}

ScalarCurve parse_curve(std::string_view literal, std::optional<Interval> domain) {
    try {
        return build_curve(parse_curve_literal(literal), domain);
    } catch (const LocalError& le) {
        throw ParseError(1, static_cast<int>(le.offset) + 1, "malformed curve literal: " + le.message);
    }
}

std::string serialize(const Circuit& circuit) {
    std::string out = "circuit " + quote(circuit.name) + " formulation " + std::string(formulation_token(circuit.formulation)) +
                      " coords " + std::to_string(circuit.n_coords) + "\n";
    for (const auto& e : circuit.elements) {
        out += "element " + e.name + " " + std::string(kind_token(e.kind)) + " ";
        if (e.is_conventional()) {
            out += "value=" + format_real(e.value);
        } else if (e.is_memory()) {
            out += "curve=" + serialize_curve(*e.curve) + " mod=" + std::string(modulation_token(e.modulation));
        } else {
            const auto& s = *e.source;
            if (s.shape == SourceWaveform::Shape::dc) {
                out += "shape=dc amp=" + format_real(s.amplitude);
            } else {
                out += "shape=sin amp=" + format_real(s.amplitude) + " omega=" + format_real(s.omega) +
                       " phase=" + format_real(s.phase);
            }
        }
        out += " coords";
        for (const auto& m : e.members) out += (m.sign < 0 ? " -" : " +") + std::to_string(m.coord);
        out += "\n";
    }
    return out;
}

} // namespace memlag
