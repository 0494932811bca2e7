#pragma once

// JSON operator specification files.
//
//   {
//     "block_dim": 1,
//     "exponent": 2,                      // 1, 2 or "inf"
//     "diagonals": [
//       {"offset": 0, "law": {"kind": "constant", "value": [[1, 0]]}},
//       ...
//     ]
//   }
//
// Blocks are row-major lists of [re, im] pairs (a bare number is read as a
// real entry). Law kinds and their fields are listed in README.md.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bandop/operator.hpp"

namespace bandop {

/// Throws ParseError with a line/column or field-path diagnostic.
BandOperator parse_operator(const std::string& text);
BandOperator load_operator(const std::filesystem::path& path);

nlohmann::json block_to_json(const Matrix& m);
/// Canonical form: diagonals simplified and sorted, zero diagonals dropped.
/// Throws UnsupportedError for lazily derived diagonals.
nlohmann::json operator_to_json(const BandOperator& a);
std::string canonical_text(const BandOperator& a);
/// Two-space indented JSON with object-free arrays kept on one line; ends in a newline.
std::string pretty_json(const nlohmann::json& j);

}  // namespace bandop
