#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blockverify/ast.hpp"

namespace blockverify {

enum class Severity { Error, Warning };
enum class Phase { Parse, Wellformed, Runtime, Typecheck, Compile, Static };

/// Kind of proof obligation a Boogie line stands for.
enum class ObligationKind { Pre, Post, Assert, InvariantEntry, InvariantMaintain, CallPre, IndexBounds };

/// A phase-tagged report anchored (when possible) at a block.
///
/// Codes are stable identifiers (`E_*` for errors, `W_*` for warnings).
struct Diagnostic {
    Severity severity = Severity::Error;
    Phase phase = Phase::Parse;
    std::string code;
    std::optional<BlockId> block_id;
    std::optional<int> slot_index;
    std::string message;
    std::vector<BlockId> call_chain;
    /// Other blocks involved (e.g. the earlier use in a typing conflict).
    std::vector<BlockId> related;
    /// Location inside the project document, for schema errors.
    std::optional<std::string> path;
    std::optional<ObligationKind> obligation;

    bool operator==(const Diagnostic&) const = default;
};

/// Thrown by passes that reject their input; carries every diagnostic found.
class DiagnosticError : public std::runtime_error {
public:
    DiagnosticError(std::string code, std::vector<Diagnostic> diagnostics);

    const std::string& code() const { return code_; }
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

private:
    std::string code_;
    std::vector<Diagnostic> diagnostics_;
};

std::string_view to_string(Severity s);
std::string_view to_string(Phase p);
std::string_view to_string(ObligationKind k);
std::optional<ObligationKind> parse_obligation_kind(std::string_view s);

inline Diagnostic make_error(Phase phase, std::string code, std::string message,
                             std::optional<BlockId> block = std::nullopt)
{
    Diagnostic d;
    d.severity = Severity::Error;
    d.phase = phase;
    d.code = std::move(code);
    d.message = std::move(message);
    d.block_id = std::move(block);
    return d;
}

} // namespace blockverify
