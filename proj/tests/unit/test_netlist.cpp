#include <doctest.h>

#include "memlag/errors.hpp"
#include "memlag/netlist.hpp"

#include "support/generators.hpp"

#include <algorithm>
#include <sstream>

using namespace memlag;
using namespace memlag::testing;

namespace {

const char* kMeminductorLc = R"(circuit "meminductor_lc" formulation loop coords 1
element LM ML curve=poly(0,1,0,0.3333333333333333) mod=q coords +1
element C1 C value=1 coords +1
)";

const char* kTwoLoop = R"(circuit "two_loop" formulation loop coords 2
element L1  L  value=1.0 coords +1
element RM1 MR curve=poly(0,1,0,0.3333333333) mod=q coords +1
element CM1 MC curve=poly(0,2.0) mod=sigma coords +1 -2
element R1  R  value=0.5 coords +2
)";

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')) + 1; }

} // namespace

TEST_CASE("meminductor and capacitor in one loop") {
    const Circuit c = parse(kMeminductorLc);
    CHECK(c.name == "meminductor_lc");
    CHECK(c.formulation == Formulation::loop);
    CHECK(c.n_coords == 1);
    REQUIRE(c.elements.size() == 2);
    CHECK(c.elements[0].kind == ElementKind::meminductor);
    CHECK(c.elements[0].modulation == Modulation::charge);
    CHECK(c.elements[0].line == 2);
    CHECK(c.elements[1].value == 1.0);
    CHECK_FALSE(validate(c).has_errors());
}

TEST_CASE("two-loop circuit with a shared memcapacitor") {
    const Circuit c = parse(kTwoLoop);
    CHECK(c.n_coords == 2);
    REQUIRE(c.elements.size() == 4);
    const Element& cm = c.elements[2];
    CHECK(cm.kind == ElementKind::memcapacitor);
    CHECK(cm.modulation == Modulation::integrated_charge);
    REQUIRE(cm.members.size() == 2);
    CHECK(cm.members[0] == Membership{1, 1});
    CHECK(cm.members[1] == Membership{2, -1});

    const Diagnostics d = validate(c);
    CHECK_FALSE(d.has_errors());
    REQUIRE(d.entries.size() == 1);
    CHECK(d.entries[0].severity == Diagnostic::Severity::warning);
    CHECK(d.entries[0].message == "coordinate 2 is first-order");
}

TEST_CASE("empty element list is a located error") {
    try {
        parse("# nothing here\ncircuit \"e\" formulation loop coords 1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.message() == "circuit has no elements");
        CHECK(e.line() == 2);
    }
}

TEST_CASE("syntax errors carry line and column") {
    struct Case {
        const char* text;
        int line;
        int column;
    };
    const Case cases[] = {
        {"circuit \"a\" formulation loop coords 1\nelement X Q value=1 coords +1\n", 2, 11},  // unknown kind
        {"circuit \"a\" formulation loop coords 1\nelement R1 R value=abc coords +1\n", 2, 20},
        {"circuit \"a\" formulation loop coords 1\nelement R1 R value=1 coords +2\n", 2, 29},  // out of range
        {"circuit \"a\" formulation loop coords 1\nelement R1 R value=1 coords +1\nelement R1 R value=2 coords +1\n", 3, 9},
        {"circuit \"a\" formulation sideways coords 1\n", 1, 25},
    };
    for (const Case& c : cases) {
        CAPTURE(c.text);
        try {
            parse(c.text);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == c.line);
            CHECK(e.column() == c.column);
        }
    }
}

TEST_CASE("malformed curve literals are syntax errors") {
    for (const char* lit : {"poly(0,1", "poly()", "pwl((0,0))", "spline(0,1)", "poly(1,1)", "poly(0,-1)"}) {
        CAPTURE(lit);
        const std::string text = std::string("circuit \"a\" formulation loop coords 1\nelement M MR curve=") + lit +
                                 " mod=q coords +1\n";
        CHECK_THROWS_AS(parse(text), ParseError);
    }
}

TEST_CASE("validation: modulation, sources and coordinate order") {
    const Circuit wrong_mod = parse("circuit \"a\" formulation loop coords 1\n"
                                    "element L1 L value=1 coords +1\n"
                                    "element M1 MR curve=poly(0,1) mod=phi coords +1\n");
    Diagnostics d = validate(wrong_mod);
    REQUIRE(d.has_errors());
    CHECK(d.first_error()->code == "modulation-formulation");
    CHECK(d.first_error()->message == "element M1: modulation requires node analysis");
    CHECK(d.first_error()->line == 3);

    const Circuit lone_cap = parse("circuit \"a\" formulation loop coords 2\n"
                                   "element L1 L value=1 coords +1\n"
                                   "element C2 C value=1 coords +2\n");
    d = validate(lone_cap);
    REQUIRE(d.error_count() == 1);
    CHECK(d.first_error()->message.rfind("coordinate has no inertial or dissipative element", 0) == 0);

    const Circuit bad_src = parse("circuit \"a\" formulation node coords 1\n"
                                  "element C1 C value=1 coords +1\n"
                                  "element V1 VSRC shape=dc amp=1 coords +1\n");
    d = validate(bad_src);
    REQUIRE(d.has_errors());
    CHECK(d.first_error()->code == "source-formulation");
}

TEST_CASE("validation is independent of element order") {
    Rng rng(17);
    for (int k = 0; k < 50; ++k) {
        Circuit c = random_circuit(rng, k % 2 ? Formulation::node : Formulation::loop);
        // inject a formulation error so there is something to sort
        c.elements.push_back(make_memory("BAD", ElementKind::memristor,
                                         c.formulation == Formulation::loop ? Modulation::flux : Modulation::charge,
                                         ScalarCurve::polynomial({0.0, 1.0}), {{1, 1}}));
        const Diagnostics a = validate(c);
        std::shuffle(c.elements.begin(), c.elements.end(), rng);
        const Diagnostics b = validate(c);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].code == b.entries[i].code);
            CHECK(a.entries[i].message == b.entries[i].message);
        }
    }
}

TEST_CASE("serialize and parse round trip on random circuits") {
    Rng rng(101);
    for (int k = 0; k < 200; ++k) {
        const Circuit c = random_circuit(rng, k % 2 ? Formulation::node : Formulation::loop);
        const std::string text = serialize(c);
        const Circuit back = parse(text);
        CHECK(back == c);
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("round trip keeps explicit curve domains and source phases") {
    const char* text = "circuit \"d\" formulation node coords 1\n"
                       "element CM MC curve=poly(0,1,0,0.5) mod=phi domain=[-2,3] coords +1\n"
                       "element LM ML curve=pwl((-1,-2),(0,0),(2,1)) mod=rho coords -1\n"
                       "element IS ISRC shape=sin amp=0.5 omega=2 phase=0.25 coords +1\n";
    const Circuit c = parse(text);
    CHECK(c.elements[0].curve->domain() == Interval{-2.0, 3.0});
    CHECK(c.elements[2].source->phase == 0.25);
    CHECK(parse(serialize(c)) == c);
}

TEST_CASE("parse errors always point inside the input") {
    // mutate a valid netlist by deleting, duplicating and replacing characters
    const std::string base = kTwoLoop;
    const std::string alphabet = "()=,+-# \n\"abcRLMCq0123456789.eE";
    Rng rng(2718);
    int errors = 0;
    for (int k = 0; k < 3000; ++k) {
        std::string text = base;
        const int edits = uniform_int(rng, 1, 4);
        for (int e = 0; e < edits && !text.empty(); ++e) {
            const auto pos = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(text.size()) - 1));
            const char ch = alphabet[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(alphabet.size()) - 1))];
            switch (uniform_int(rng, 0, 2)) {
            case 0: text.erase(pos, 1); break;
            case 1: text.insert(pos, 1, ch); break;
            default: text[pos] = ch; break;
            }
        }
        try {
            (void)parse(text);
        } catch (const ParseError& e) {
            ++errors;
            CAPTURE(text);
            CHECK(e.line() >= 1);
            CHECK(e.line() <= count_lines(text));
            CHECK(e.column() >= 1);
        }
    }
    CHECK(errors > 100);
}
