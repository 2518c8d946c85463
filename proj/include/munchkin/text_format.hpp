//===-- text_format.hpp - Line-oriented .mir reader and writer ------------===//
//
// Grammar (one item per line, '#' starts a comment):
//
//   program <name>
//   func <name>(<param>, ...)
//   block <id>:
//     <dest> = const <int>
//     <dest> = input
//     <dest> = add|sub|mul|div|mod <operand> <operand>
//     [<dest> =] call <name>(<operand>, ...)
//     print <operand>
//     br lt|le|eq|ne|ge|gt <operand> <operand> -> <then>, <else>
//     jmp <id>
//     ret [<operand>]
//
// An operand is a local name or a decimal int32 literal. The first block of a
// function is its entry block. Every block ends with exactly one terminator.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/ir.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace munchkin {

class ParseError : public std::runtime_error {
public:
  enum class Kind { Syntax, Validation };

  ParseError(Kind kind, std::size_t line, std::size_t column,
             const std::string &message);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Parses and validates. Throws ParseError on syntax or validation failure.
Program parse_program(std::string_view text);

/// Canonical text: entry function first, then the rest by name; inside a
/// function the entry block first, then the rest by id.
std::string serialize_program(const Program &program);

Program load_program(const std::string &path);
void save_program(const Program &program, const std::string &path);

} // namespace munchkin
