#pragma once

#include "mapple/dsl/ast.hpp"
#include "mapple/error.hpp"

#include <string>
#include <string_view>

namespace mapple::dsl {

/// Thrown for lexical and grammatical errors; carries the 1-based position.
class SyntaxError : public Error {
 public:
  SyntaxError(SourceLoc loc, const std::string& message, Errc code = Errc::SyntaxError)
      : Error(code, std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " + message),
        loc_(loc),
        detail_(message) {}

  SourceLoc loc() const noexcept { return loc_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SourceLoc loc_;
  std::string detail_;
};

/// Parses a mapper source. Statements are line oriented; function bodies are
/// indented under `def name(params):` or written inline after the colon and
/// separated by `;`. `#` starts a comment.
MapperProgram parse(std::string_view source);

/// Canonical source text; parse(print(p)) is equivalent to p.
std::string print(const MapperProgram& program);
std::string print(const Expr& expr);

}  // namespace mapple::dsl
