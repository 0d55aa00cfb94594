#include "blockverify/diagnostic.hpp"

#include <array>
#include <utility>

namespace blockverify {

DiagnosticError::DiagnosticError(std::string code, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(diagnostics.empty() ? code : code + ": " + diagnostics.front().message),
      code_(std::move(code)),
      diagnostics_(std::move(diagnostics))
{
}

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

std::string_view to_string(Phase p)
{
    switch (p) {
    case Phase::Parse: return "parse";
    case Phase::Wellformed: return "wellformed";
    case Phase::Runtime: return "runtime";
    case Phase::Typecheck: return "typecheck";
    case Phase::Compile: return "compile";
    case Phase::Static: return "static";
    }
    return "?";
}

namespace {
constexpr std::array<std::pair<ObligationKind, std::string_view>, 7> kObligations{{
    {ObligationKind::Pre, "pre"},
    {ObligationKind::Post, "post"},
    {ObligationKind::Assert, "assert"},
    {ObligationKind::InvariantEntry, "invariantEntry"},
    {ObligationKind::InvariantMaintain, "invariantMaintain"},
    {ObligationKind::CallPre, "callPre"},
    {ObligationKind::IndexBounds, "indexBounds"},
}};
} // namespace

std::string_view to_string(ObligationKind k)
{
    for (const auto& [kind, name] : kObligations)
        if (kind == k)
            return name;
    return "?";
}

std::optional<ObligationKind> parse_obligation_kind(std::string_view s)
{
    for (const auto& [kind, name] : kObligations)
        if (name == s)
            return kind;
    return std::nullopt;
}

} // namespace blockverify
