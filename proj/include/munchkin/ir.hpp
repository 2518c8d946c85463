//===-- ir.hpp - Mini imperative IR ---------------------------------------===//
//
// Functions over basic blocks with int32 locals. A Program is immutable once
// it has passed validation; every analysis in the project consumes it through
// const references.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace munchkin {

using FunctionName = std::string;
using BlockId = std::string;
using LocalName = std::string;

/// Input values are int32; arithmetic on them wraps (two's complement).
using InputVector = std::vector<std::int32_t>;

/// A local/parameter reference or an immediate literal.
struct Operand {
  std::variant<LocalName, std::int32_t> value;

  static Operand local(LocalName name) { return Operand{std::move(name)}; }
  static Operand imm(std::int32_t v) { return Operand{v}; }

  bool is_local() const { return std::holds_alternative<LocalName>(value); }
  const LocalName &name() const { return std::get<LocalName>(value); }
  std::int32_t literal() const { return std::get<std::int32_t>(value); }

  friend bool operator==(const Operand &, const Operand &) = default;
};

enum class BinOpKind { Add, Sub, Mul, Div, Mod };
enum class CmpKind { Lt, Le, Eq, Ne, Ge, Gt };

std::string_view to_string(BinOpKind op);
std::string_view to_string(CmpKind cmp);
std::optional<BinOpKind> parse_binop(std::string_view text);
std::optional<CmpKind> parse_cmp(std::string_view text);

/// Logical negation: !(a < b) == (a >= b).
CmpKind negate(CmpKind cmp);
/// Operand swap: (a < b) == (b > a).
CmpKind swap_sides(CmpKind cmp);
bool evaluate(CmpKind cmp, std::int32_t lhs, std::int32_t rhs);

struct ConstInst {
  LocalName dest;
  std::int32_t value = 0;
  friend bool operator==(const ConstInst &, const ConstInst &) = default;
};

struct ReadInputInst {
  LocalName dest;
  friend bool operator==(const ReadInputInst &, const ReadInputInst &) = default;
};

struct BinOpInst {
  LocalName dest;
  BinOpKind op = BinOpKind::Add;
  Operand lhs;
  Operand rhs;
  friend bool operator==(const BinOpInst &, const BinOpInst &) = default;
};

struct CallInst {
  std::optional<LocalName> dest;
  FunctionName callee;
  std::vector<Operand> args;
  friend bool operator==(const CallInst &, const CallInst &) = default;
};

struct PrintInst {
  Operand operand;
  friend bool operator==(const PrintInst &, const PrintInst &) = default;
};

using Instruction =
    std::variant<ConstInst, ReadInputInst, BinOpInst, CallInst, PrintInst>;

struct BranchTerm {
  CmpKind cmp = CmpKind::Eq;
  Operand lhs;
  Operand rhs;
  BlockId then_block;
  BlockId else_block;
  friend bool operator==(const BranchTerm &, const BranchTerm &) = default;
};

struct JumpTerm {
  BlockId target;
  friend bool operator==(const JumpTerm &, const JumpTerm &) = default;
};

struct ReturnTerm {
  std::optional<Operand> value;
  friend bool operator==(const ReturnTerm &, const ReturnTerm &) = default;
};

using Terminator = std::variant<BranchTerm, JumpTerm, ReturnTerm>;

/// Successor block ids of a terminator, in then/else order.
std::vector<BlockId> successors(const Terminator &term);

struct Block {
  BlockId id;
  std::vector<Instruction> instructions;
  Terminator terminator = ReturnTerm{};
  friend bool operator==(const Block &, const Block &) = default;
};

struct Function {
  FunctionName name;
  std::vector<LocalName> params;
  std::map<BlockId, Block> blocks;
  BlockId entry_block;

  const Block &block(const BlockId &id) const;
  friend bool operator==(const Function &, const Function &) = default;
};

struct Program {
  std::string name = "anonymous";
  std::map<FunctionName, Function> functions;
  FunctionName entry = "main";

  const Function &function(const FunctionName &name) const;
  bool has_function(const FunctionName &fn) const {
    return functions.count(fn) != 0;
  }
  friend bool operator==(const Program &, const Program &) = default;
};

/// Where a diagnostic points inside a Program. Empty fields mean "whole
/// program" / "whole function" / "terminator" respectively.
struct IrLocation {
  FunctionName function;
  BlockId block;
  std::optional<std::size_t> instruction;
};

struct Diagnostic {
  enum class Severity { Warning, Error };
  Severity severity = Severity::Error;
  IrLocation where;
  std::string message;
};

/// Checks every structural invariant: entry function, callee existence and
/// arity, branch targets, definite assignment of locals. Unreachable blocks
/// are reported as warnings.
std::vector<Diagnostic> validate(const Program &program);

/// Thrown for programs that do not satisfy the IR invariants.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic> &diagnostics() const { return diags_; }

private:
  std::vector<Diagnostic> diags_;
};

/// Throws ValidationError if validate() reports any error.
void require_valid(const Program &program);

/// Number of Branch terminators across all functions.
std::size_t count_branches(const Program &program);

} // namespace munchkin
