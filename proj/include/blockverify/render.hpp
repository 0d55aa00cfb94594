#pragma once

// Human-readable and JSON rendering of diagnostics and reports. Every
// function here is pure: the same inputs give byte-identical text.

#include <string>
#include <vector>

#include "blockverify/boogie.hpp"
#include "blockverify/diagnostic.hpp"
#include "blockverify/interpreter.hpp"

namespace blockverify {

/// "set block in script 'main'", "hat block of reporter 'increment'", ...
/// Falls back to the bare id when the program does not contain it.
std::string describe_block(const Program* program, const BlockId& id);

std::string render_diagnostics_text(const std::vector<Diagnostic>& diagnostics, const Program* program = nullptr);
std::string render_diagnostics_json(const std::vector<Diagnostic>& diagnostics);

/// Framed violation report, or the result/globals of a passing run.
std::string render_report_text(const ExecutionReport& report, const Program& program);
std::string render_report_json(const ExecutionReport& report);

std::string render_verdict_text(const StaticVerdict& verdict, const Program* program = nullptr);
std::string render_verdict_json(const StaticVerdict& verdict);

/// One line for standard error, e.g. "2 errors, 1 warning".
std::string summary_line(const std::vector<Diagnostic>& diagnostics);

} // namespace blockverify
