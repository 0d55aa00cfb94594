#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "blockverify/ast.hpp"
#include "blockverify/diagnostic.hpp"

namespace blockverify {

/// Names reserved for generated code.
inline constexpr std::string_view kReservedPrefix = "__";

/// Returns every well-formedness violation of `program`, in document order.
/// An empty result means the program is valid.
///
/// Checked: placement of `result`, `old` and `report`; name resolution for
/// variables and blocks; call arity and block kind; parameter/local/global
/// shadowing; assignments to parameters; reserved and malformed names.
std::vector<Diagnostic> validate(const Program& program);

/// Variables read by `e`, excluding names bound by an enclosing quantifier
/// inside `e`. `old(g)` reads `g`.
std::set<std::string> free_variables(const Expr& e);

/// Variables named under `old(...)` anywhere in `e`.
std::set<std::string> old_variables(const Expr& e);

/// Locals declared anywhere in `body` (including nested statement lists).
std::set<std::string> declared_locals(const std::vector<Stmt>& body);

} // namespace blockverify
