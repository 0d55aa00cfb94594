#pragma once

// The static pipeline end to end: typecheck, modifies, compile, and an
// optional Boogie run.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "blockverify/boogie.hpp"
#include "blockverify/static_types.hpp"

namespace blockverify {

struct StaticResult {
    std::optional<TypedProgram> typed;
    std::optional<BoogieUnit> unit;
    /// Rejections (typecheck or compile) followed by warnings.
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return unit.has_value(); }
};

/// Never throws DiagnosticError; findings are returned in `diagnostics`.
StaticResult run_static(const Program& program);

/// Writes `unit` to `bpl_path`, runs `boogie <bpl_path>` and maps the output.
/// Launch failures (E_BOOGIE_LAUNCH), time-outs (E_BOOGIE_TIMEOUT) and
/// unexpected exit statuses give outcome ToolFailure.
StaticVerdict run_boogie(const BoogieUnit& unit, const std::string& boogie, const std::filesystem::path& bpl_path,
                         std::chrono::seconds timeout);

/// Writes `text` to `path`, returning false if the file cannot be written.
bool write_file(const std::filesystem::path& path, const std::string& text);

} // namespace blockverify
