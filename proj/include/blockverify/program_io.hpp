#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "blockverify/ast.hpp"
#include "blockverify/diagnostic.hpp"

namespace blockverify {

inline constexpr int kFormatVersion = 1;

/// Parses a `.blocks.json` project document.
///
/// Node ids are assigned from document order. Throws DiagnosticError with
/// code E_SCHEMA (malformed document; the diagnostic carries a path such as
/// `/blocks/0/post/1`) or E_WELLFORMED (wrapping validate()'s findings).
Program parse_program(std::string_view text);

/// Canonical serialization: fixed key order, two-space indentation, trailing
/// newline. Throws DiagnosticError(E_UNSERIALIZABLE) for values JSON cannot
/// represent (non-finite numbers).
std::string serialize_program(const Program& program);

/// Reads and parses a project file. Unreadable files raise E_IO.
Program load_program(const std::filesystem::path& file);

} // namespace blockverify
