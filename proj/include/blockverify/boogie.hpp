#pragma once

// Boogie code generation and verdict mapping.
//
// Every obligation line of the emitted text ends with a structured comment
//   // @src <blockId> <obligationKind> [<slot>]
// and the same information is kept in a SourceMap keyed by (line, column).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockverify/diagnostic.hpp"
#include "blockverify/static_types.hpp"

namespace blockverify {

inline constexpr int kPreludeVersion = 1;

/// Verbatim text placed at the top of every generated file.
std::string_view boogie_prelude();

struct SourceMapEntry {
    int line = 0; // 1-based
    int col = 0;  // 1-based column of the obligation keyword
    BlockId block_id;
    ObligationKind kind = ObligationKind::Assert;
    /// Contract or invariant slot (1-based); 0 for the generated repeat-counter invariant.
    std::optional<int> slot;

    bool operator==(const SourceMapEntry&) const = default;
};

struct SourceMap {
    std::vector<SourceMapEntry> entries;

    /// Exact (line, col) match first, then any entry on that line.
    const SourceMapEntry* lookup(int line, int col) const;

    bool operator==(const SourceMap&) const = default;
};

struct BoogieUnit {
    std::string text;
    SourceMap source_map;
    int prelude_version = kPreludeVersion;
};

/// Translates a checked program. Throws DiagnosticError("E_COMPILE") whose
/// diagnostics are E_UNSUPPORTED_CONSTRUCT findings, each at a blockId.
BoogieUnit compile(const TypedProgram& typed);

/// Sidecar `.srcmap.json` document.
std::string source_map_to_json(const BoogieUnit& unit);
/// Inverse of source_map_to_json; throws DiagnosticError("E_SCHEMA").
SourceMap source_map_from_json(std::string_view text);

struct StaticVerdict {
    enum class Outcome { Verified, Errors, ToolFailure };

    Outcome outcome = Outcome::ToolFailure;
    int verified = 0;
    int errors = 0;
    std::vector<Diagnostic> diagnostics;

    bool operator==(const StaticVerdict&) const = default;
};

std::string_view to_string(StaticVerdict::Outcome o);

/// Reads the standard output of one Boogie run on a file compiled with `map`.
/// Unparseable output yields outcome ToolFailure with an E_BOOGIE_OUTPUT
/// diagnostic; errors at unmapped locations yield E_UNMAPPED_LOCATION.
StaticVerdict parse_boogie_output(std::string_view output, const SourceMap& map);

} // namespace blockverify
