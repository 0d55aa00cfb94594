#pragma once

// Static fragment checker: infers one monomorphic type per variable and
// rejects anything outside {Int, Bool, IntList}.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "blockverify/ast.hpp"
#include "blockverify/diagnostic.hpp"

namespace blockverify {

enum class StaticType { Int, Bool, IntList };

std::string_view to_string(StaticType t);

struct TypedProgram {
    Program program;
    std::map<std::string, StaticType> globals;
    /// Per block or entry script: parameters and locals.
    std::map<std::string, std::map<std::string, StaticType>> variables;
    /// Result type of every reporter and predicate.
    std::map<std::string, StaticType> results;
    /// Type of every expression node, by id.
    std::map<BlockId, StaticType> expressions;
    /// Globals each block or script assigns, directly or through calls.
    std::map<std::string, std::set<std::string>> modifies;
    /// Non-fatal findings such as W_DIV_SEMANTICS.
    std::vector<Diagnostic> warnings;

    /// Type of `name` as seen from inside `scope` (locals/params, then globals).
    std::optional<StaticType> type_of(const std::string& scope, const std::string& name) const;
};

/// Unification-based inference over assignments, uses, contracts and calls.
/// Throws DiagnosticError("E_TYPECHECK") listing every rejection found:
/// E_DYNAMIC_TYPING, E_NESTED_LIST, E_TEXT_UNSUPPORTED, E_NONINT_LITERAL,
/// E_UNTYPEABLE. The returned program has an empty `modifies`.
TypedProgram infer_types(const Program& program);

/// Least fixpoint of "globals assigned in the body, plus those of every
/// callee". Idempotent.
TypedProgram compute_modifies(TypedProgram typed);

/// infer_types followed by compute_modifies.
TypedProgram check_static(const Program& program);

} // namespace blockverify
