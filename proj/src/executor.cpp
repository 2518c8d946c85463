#include "munchkin/executor.hpp"

#include <algorithm>

namespace munchkin {

void CoverageMap::merge(const CoverageMap &other) {
  functions.insert(other.functions.begin(), other.functions.end());
  edge_bits |= other.edge_bits;
}

CoverageMap merge_coverage(const CoverageMap &a, const CoverageMap &b) {
  CoverageMap out = a;
  out.merge(b);
  return out;
}

std::string_view to_string(Outcome o) {
  switch (o) {
  case Outcome::Completed: return "completed";
  case Outcome::ArithmeticFault: return "arithmetic-fault";
  case Outcome::StepLimitExceeded: return "step-limit";
  }
  return "?";
}

bool apply_binop(BinOpKind op, std::int32_t lhs, std::int32_t rhs,
                 std::int32_t &out) {
  const auto ul = static_cast<std::uint32_t>(lhs);
  const auto ur = static_cast<std::uint32_t>(rhs);
  switch (op) {
  case BinOpKind::Add: out = static_cast<std::int32_t>(ul + ur); return true;
  case BinOpKind::Sub: out = static_cast<std::int32_t>(ul - ur); return true;
  case BinOpKind::Mul: out = static_cast<std::int32_t>(ul * ur); return true;
  case BinOpKind::Div:
    if (rhs == 0)
      return false;
    out = (lhs == INT32_MIN && rhs == -1) ? INT32_MIN : lhs / rhs;
    return true;
  case BinOpKind::Mod:
    if (rhs == 0)
      return false;
    out = (lhs == INT32_MIN && rhs == -1) ? 0 : lhs % rhs;
    return true;
  }
  return false;
}

namespace {

struct Frame {
  FuncIndex fn;
  BlockIndex block;
  std::size_t ip = 0;
  std::vector<std::int32_t> slots;
  SlotIndex ret_dest = kNoSlot;
};

std::int32_t read(const Frame &f, const LOperand &op) {
  return op.is_slot ? f.slots[op.slot] : op.imm;
}

} // namespace

RunResult run_concrete(const LoweredProgram &program, const InputVector &input,
                       std::uint64_t step_limit) {
  RunResult result;
  std::vector<bool> entered(program.functions.size(), false);
  std::uint32_t prev_hash = 0;
  std::size_t next_input = 0;

  auto visit_block = [&](FuncIndex fn, BlockIndex b) {
    auto h = program.functions[fn].blocks[b].location_hash;
    result.coverage.edge_bits.set(edge_index(prev_hash, h));
    prev_hash = h;
  };
  auto enter = [&](FuncIndex fn) {
    entered[fn] = true;
    const auto &lf = program.functions[fn];
    Frame f{fn, lf.entry, 0, std::vector<std::int32_t>(lf.num_slots, 0), kNoSlot};
    visit_block(fn, lf.entry);
    return f;
  };

  std::vector<Frame> stack;
  stack.push_back(enter(program.main));

  while (!stack.empty()) {
    if (result.steps >= step_limit) {
      result.outcome = Outcome::StepLimitExceeded;
      break;
    }
    ++result.steps;
    Frame &frame = stack.back();
    const LBlock &block = program.functions[frame.fn].blocks[frame.block];

    if (frame.ip < block.insts.size()) {
      const LInst &inst = block.insts[frame.ip++];
      switch (inst.kind) {
      case LInst::Kind::Const:
        frame.slots[inst.dest] = inst.a.imm;
        break;
      case LInst::Kind::Input:
        frame.slots[inst.dest] = next_input < input.size() ? input[next_input] : 0;
        ++next_input;
        break;
      case LInst::Kind::BinOp: {
        std::int32_t v = 0;
        if (!apply_binop(inst.op, read(frame, inst.a), read(frame, inst.b), v)) {
          result.outcome = Outcome::ArithmeticFault;
          stack.clear();
          continue;
        }
        frame.slots[inst.dest] = v;
        break;
      }
      case LInst::Kind::Print:
        result.printed.push_back(read(frame, inst.a));
        break;
      case LInst::Kind::Call: {
        std::vector<std::int32_t> args;
        args.reserve(inst.args.size());
        for (const auto &a : inst.args)
          args.push_back(read(frame, a));
        Frame callee = enter(inst.callee);
        std::copy(args.begin(), args.end(), callee.slots.begin());
        callee.ret_dest = inst.dest;
        stack.push_back(std::move(callee)); // invalidates `frame`
        break;
      }
      }
      continue;
    }

    const LTerm &term = block.term;
    switch (term.kind) {
    case LTerm::Kind::Branch:
      frame.block = evaluate(term.cmp, read(frame, term.a), read(frame, term.b))
                        ? term.then_block
                        : term.else_block;
      frame.ip = 0;
      visit_block(frame.fn, frame.block);
      break;
    case LTerm::Kind::Jump:
      frame.block = term.then_block;
      frame.ip = 0;
      visit_block(frame.fn, frame.block);
      break;
    case LTerm::Kind::Return: {
      std::optional<std::int32_t> value;
      if (term.has_value)
        value = read(frame, term.a);
      SlotIndex dest = frame.ret_dest;
      stack.pop_back();
      if (stack.empty()) {
        result.exit_value = value;
        break;
      }
      Frame &caller = stack.back();
      if (dest != kNoSlot)
        caller.slots[dest] = value.value_or(0);
      visit_block(caller.fn, caller.block);
      break;
    }
    }
  }

  for (FuncIndex i = 0; i < entered.size(); ++i)
    if (entered[i])
      result.coverage.functions.insert(program.functions[i].name);
  return result;
}

RunResult run_concrete(const Program &program, const InputVector &input,
                       std::uint64_t step_limit) {
  return run_concrete(lower(program), input, step_limit);
}

} // namespace munchkin
