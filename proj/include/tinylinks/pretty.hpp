#pragma once

#include <string>

#include "tinylinks/ast.hpp"

namespace tinylinks {

// Canonical source rendering. For every well-formed tree e (whether built by
// the parser, the generator, or by hand), parse(pretty(e)) reproduces e
// exactly; the printer emits parentheses only where the grammar demands them.
std::string pretty(const ValuePtr& v);
std::string pretty(const ExprPtr& e);

// Quotes and escapes a string the way the lexer expects (\" \\ \n \t).
std::string quote_string(const std::string& s);

}  // namespace tinylinks
