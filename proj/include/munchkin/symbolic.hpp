//===-- symbolic.hpp - Symbolic values and path conditions ----------------===//
//
// A SymValue is either linear, c0 + sum(ci * xi) taken modulo 2^32 and read
// back as int32, or Opaque (any non-linear result over symbolic operands).
// Coefficients are stored as their int32 representatives, so wrap-around
// arithmetic on linear values stays exact.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/ir.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace munchkin {

using VarIndex = std::uint32_t;

class SymValue {
public:
  struct Term {
    VarIndex var;
    std::int32_t coeff;
    friend bool operator==(const Term &, const Term &) = default;
    friend auto operator<=>(const Term &, const Term &) = default;
  };

  SymValue() = default;
  static SymValue constant(std::int32_t c);
  static SymValue variable(VarIndex v);
  static SymValue opaque();

  bool is_opaque() const { return opaque_; }
  bool is_constant() const { return !opaque_ && terms_.empty(); }
  std::int32_t constant_term() const { return constant_; }
  /// Sorted by variable, no zero coefficients.
  const std::vector<Term> &terms() const { return terms_; }
  /// Largest variable index + 1 (0 for constants and opaque values).
  VarIndex num_vars() const;

  /// Value under `model` with int32 wrap-around; requires !is_opaque().
  /// Variables beyond the model read as 0.
  std::int32_t evaluate(const std::vector<std::int32_t> &model) const;

  /// Linear where possible, Opaque otherwise. Div/Mod with a constant zero
  /// divisor are the caller's problem (returns Opaque).
  static SymValue binop(BinOpKind op, const SymValue &a, const SymValue &b);

  std::string to_string() const;

  friend bool operator==(const SymValue &, const SymValue &) = default;
  friend auto operator<=>(const SymValue &, const SymValue &) = default;

private:
  bool opaque_ = false;
  std::int32_t constant_ = 0;
  std::vector<Term> terms_;
};

struct Constraint {
  CmpKind cmp = CmpKind::Eq;
  SymValue lhs;
  SymValue rhs;

  bool has_opaque() const { return lhs.is_opaque() || rhs.is_opaque(); }
  /// Requires !has_opaque().
  bool holds(const std::vector<std::int32_t> &model) const;
  Constraint negated() const { return {negate(cmp), lhs, rhs}; }
  /// Same truth value; comparison restricted to lt/le/eq/ne, eq/ne sides
  /// ordered.
  Constraint canonical() const;
  std::string to_string() const;

  friend bool operator==(const Constraint &, const Constraint &) = default;
  friend auto operator<=>(const Constraint &, const Constraint &) = default;
};

/// Conjunction of branch constraints, append-only along a path.
struct PathCondition {
  std::vector<Constraint> constraints;

  PathCondition with(Constraint c) const {
    PathCondition out = *this;
    out.constraints.push_back(std::move(c));
    return out;
  }
  VarIndex num_vars() const;
  /// Sorted, deduplicated canonical constraints rendered as text; equal keys
  /// denote logically identical conditions.
  std::string canonical_key() const;
};

} // namespace munchkin
