#pragma once

// Command-line argument literals: `3`, `-2.5`, `true`, `[1,2,3]`, `"text"`,
// optionally prefixed by `name=`.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockverify/interpreter.hpp"

namespace blockverify {

std::optional<Value> parse_literal(std::string_view text);

/// Binds raw arguments to the parameters of `block` (positionally, or by
/// `name=value`). Throws DiagnosticError("E_ARGS") on malformed literals or
/// a mix of positional and named arguments that cannot be resolved.
Bindings bind_args(const std::vector<std::string>& raw, const BlockDef* block);

} // namespace blockverify
