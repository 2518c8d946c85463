//===-- lowered.hpp - Index-resolved form of a validated Program ----------===//
//
// Names are resolved to dense indices so the interpreter and the symbolic
// engine never do string lookups on the hot path. Locals become frame slots;
// parameters occupy the first slots in declaration order.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/ir.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace munchkin {

using FuncIndex = std::uint32_t;
using BlockIndex = std::uint32_t;
using SlotIndex = std::uint32_t;

inline constexpr SlotIndex kNoSlot = UINT32_MAX;

struct LOperand {
  bool is_slot = false;
  SlotIndex slot = 0;
  std::int32_t imm = 0;
};

struct LInst {
  enum class Kind { Const, Input, BinOp, Call, Print };
  Kind kind = Kind::Const;
  SlotIndex dest = kNoSlot;
  BinOpKind op = BinOpKind::Add;
  LOperand a;
  LOperand b;
  FuncIndex callee = 0;
  std::vector<LOperand> args;
};

struct LTerm {
  enum class Kind { Branch, Jump, Return };
  Kind kind = Kind::Return;
  CmpKind cmp = CmpKind::Eq;
  LOperand a;
  LOperand b;
  BlockIndex then_block = 0;
  BlockIndex else_block = 0;
  bool has_value = false;
};

struct LBlock {
  BlockId id;
  std::vector<LInst> insts;
  LTerm term;
  /// fnv1a(function name, 0x00, block id); see edge_index().
  std::uint32_t location_hash = 0;
};

struct LFunction {
  FunctionName name;
  std::uint32_t num_params = 0;
  std::uint32_t num_slots = 0;
  BlockIndex entry = 0;
  std::vector<LBlock> blocks;
  std::vector<LocalName> slot_names;

  BlockIndex block_index(const BlockId &id) const;
};

struct LoweredProgram {
  std::string name;
  std::vector<LFunction> functions;
  FuncIndex main = 0;
  std::unordered_map<FunctionName, FuncIndex> index;

  FuncIndex function_index(const FunctionName &fn) const;
  const LFunction &function(FuncIndex i) const { return functions[i]; }
};

/// Requires a valid Program (throws ValidationError otherwise).
LoweredProgram lower(const Program &program);

/// 32-bit FNV-1a over `fn`, a 0x00 separator, then `block`.
std::uint32_t location_hash(std::string_view fn, std::string_view block);

/// AFL-style edge slot: ((prev >> 1) ^ cur) & 0xFFFF. The hash of the
/// virtual location before main's entry is 0.
inline std::uint32_t edge_index(std::uint32_t prev_hash, std::uint32_t cur_hash) {
  return ((prev_hash >> 1) ^ cur_hash) & 0xFFFFu;
}

} // namespace munchkin
