#pragma once

#include <string_view>

#include "wsnq/query_ast.hpp"

namespace wsnq {

// Grammar (keywords case-insensitive, whitespace free):
//
//   query  := SELECT item ("," item)* FROM "sensors"
//             [WHERE pred (AND pred)*] [GROUP BY attr] [EPOCH DURATION int]
//   item   := attr | fn "(" attr ")" | COUNT "(" "*" ")"
//   fn     := COUNT | SUM | MIN | MAX | AVG
//   pred   := attr op number
//   op     := "<" | "<=" | ">" | ">=" | "=" | "!="
//
// Numeric literals are bare decimals; a trailing letter run (e.g. "450db")
// raises ErrorCode::UnitSuffix. Any other malformed input raises
// ErrorCode::Syntax with the byte offset and the expected token in the
// message. Never aborts on arbitrary input.
QueryAst parse_query(std::string_view text);

}  // namespace wsnq
