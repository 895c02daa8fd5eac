#pragma once

#include "mapple/dsl/ast.hpp"

#include <string>
#include <vector>

namespace mapple::dsl {

enum class Severity { Error, Warning };

const char* severity_name(Severity s) noexcept;

struct Diagnostic {
  Severity severity;
  std::string code;  // e.g. "UnknownMemory", "Extension"
  std::string message;
  SourceLoc loc;
};

/// Static checks against the terminal sets and the function table. An empty
/// result (or warnings only) means the program can be evaluated.
std::vector<Diagnostic> validate(const MapperProgram& program);

bool has_errors(const std::vector<Diagnostic>& diags) noexcept;

}  // namespace mapple::dsl
