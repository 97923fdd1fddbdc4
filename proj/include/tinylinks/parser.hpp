#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "tinylinks/ast.hpp"

namespace tinylinks {

struct ParseError : std::runtime_error {
  int line;
  int column;
  ParseError(int line, int column, const std::string& what)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line(line),
        column(column) {}
};

// Parses a complete program. Throws ParseError with 1-based position info.
ExprPtr parse(std::string_view source);

}  // namespace tinylinks
