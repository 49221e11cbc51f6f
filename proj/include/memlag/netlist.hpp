#pragma once

// =============================================================================
// Netlist text format
// =============================================================================
//   circuit "name" formulation (loop|node) coords N
//   element NAME KIND params... coords +1 -2 ...
// KIND is one of R L C MR ML MC VSRC ISRC; `#` starts a comment.
// =============================================================================

#include "memlag/element.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace memlag {

enum class Formulation { loop, node };

struct Circuit {
    std::string name;
    Formulation formulation = Formulation::loop;
    int n_coords = 0;
    std::vector<Element> elements;

    bool operator==(const Circuit&) const = default;
};

struct Diagnostic {
    enum class Severity { error, warning };

    Severity severity = Severity::error;
    std::string code;
    std::string message;
    int line = 0;
};

struct Diagnostics {
    std::vector<Diagnostic> entries;

    [[nodiscard]] bool has_errors() const noexcept;
    [[nodiscard]] std::size_t error_count() const noexcept;
    [[nodiscard]] const Diagnostic* first_error() const noexcept;
};

/// Parses netlist text. Throws ParseError (with line and column) on any
/// syntax or structural problem.
Circuit parse(std::string_view text);

/// Formulation-compatibility and system-order checks. Never throws; entries
/// are sorted by severity, code, and message so the result does not depend
/// on element declaration order.
Diagnostics validate(const Circuit& circuit);

/// Canonical text form; parse(serialize(c)) == c.
std::string serialize(const Circuit& circuit);

/// Canonical text of a curve literal, e.g. `poly(0,1,0,0.5)`.
std::string serialize_curve(const ScalarCurve& curve);

/// Parses a curve literal with an optional explicit domain.
ScalarCurve parse_curve(std::string_view literal, std::optional<Interval> domain = std::nullopt);

[[nodiscard]] std::string_view formulation_token(Formulation f) noexcept;

/// Inertial elements: inductive in loop analysis, capacitive in node analysis.
[[nodiscard]] bool is_inertial(ElementKind kind, Formulation f) noexcept;
[[nodiscard]] bool is_dissipative(ElementKind kind) noexcept;

} // namespace memlag
