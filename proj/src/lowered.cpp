#include "munchkin/lowered.hpp"

namespace munchkin {

std::uint32_t location_hash(std::string_view fn, std::string_view block) {
  std::uint32_t h = 2166136261u;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 16777619u;
  };
  for (char c : fn)
    mix(static_cast<unsigned char>(c));
  mix(0);
  for (char c : block)
    mix(static_cast<unsigned char>(c));
  return h;
}

BlockIndex LFunction::block_index(const BlockId &id) const {
  for (BlockIndex i = 0; i < blocks.size(); ++i)
    if (blocks[i].id == id)
      return i;
  throw std::out_of_range("unknown block '" + id + "' in '" + name + "'");
}

FuncIndex LoweredProgram::function_index(const FunctionName &fn) const {
  auto it = index.find(fn);
  if (it == index.end())
    throw std::out_of_range("unknown function '" + fn + "'");
  return it->second;
}

namespace {

class Lowering {
public:
  Lowering(const Program &p, LoweredProgram &out) : program_(p), out_(out) {}

  void run() {
    out_.name = program_.name;
    for (const auto &[name, _] : program_.functions) {
      out_.index.emplace(name, static_cast<FuncIndex>(out_.functions.size()));
      out_.functions.emplace_back().name = name;
    }
    out_.main = out_.function_index(program_.entry);
    for (const auto &[name, fn] : program_.functions)
      lower_function(fn, out_.functions[out_.index.at(name)]);
  }

private:
  void lower_function(const Function &fn, LFunction &lf) {
    slots_.clear();
    lf.num_params = static_cast<std::uint32_t>(fn.params.size());
    for (const auto &p : fn.params)
      slot(p, lf);

    std::unordered_map<BlockId, BlockIndex> block_ix;
    for (const auto &[id, _] : fn.blocks)
      block_ix.emplace(id, static_cast<BlockIndex>(block_ix.size()));
    lf.entry = block_ix.at(fn.entry_block);

    for (const auto &[id, b] : fn.blocks) {
      LBlock lb;
      lb.id = id;
      lb.location_hash = location_hash(fn.name, id);
      for (const auto &inst : b.instructions)
        lb.insts.push_back(lower_inst(inst, lf));
      std::visit(
          [&](const auto &t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, BranchTerm>) {
              lb.term.kind = LTerm::Kind::Branch;
              lb.term.cmp = t.cmp;
              lb.term.a = operand(t.lhs, lf);
              lb.term.b = operand(t.rhs, lf);
              lb.term.then_block = block_ix.at(t.then_block);
              lb.term.else_block = block_ix.at(t.else_block);
            } else if constexpr (std::is_same_v<T, JumpTerm>) {
              lb.term.kind = LTerm::Kind::Jump;
              lb.term.then_block = block_ix.at(t.target);
            } else {
              lb.term.kind = LTerm::Kind::Return;
              lb.term.has_value = t.value.has_value();
              if (t.value)
                lb.term.a = operand(*t.value, lf);
            }
          },
          b.terminator);
      lf.blocks.push_back(std::move(lb));
    }
    lf.num_slots = static_cast<std::uint32_t>(lf.slot_names.size());
  }

  LInst lower_inst(const Instruction &inst, LFunction &lf) {
    LInst li;
    std::visit(
        [&](const auto &i) {
          using T = std::decay_t<decltype(i)>;
          if constexpr (std::is_same_v<T, ConstInst>) {
            li.kind = LInst::Kind::Const;
            li.a.imm = i.value;
            li.dest = slot(i.dest, lf);
          } else if constexpr (std::is_same_v<T, ReadInputInst>) {
            li.kind = LInst::Kind::Input;
            li.dest = slot(i.dest, lf);
          } else if constexpr (std::is_same_v<T, BinOpInst>) {
            li.kind = LInst::Kind::BinOp;
            li.op = i.op;
            li.a = operand(i.lhs, lf);
            li.b = operand(i.rhs, lf);
            li.dest = slot(i.dest, lf);
          } else if constexpr (std::is_same_v<T, CallInst>) {
            li.kind = LInst::Kind::Call;
            li.callee = out_.index.at(i.callee);
            for (const auto &a : i.args)
              li.args.push_back(operand(a, lf));
            li.dest = i.dest ? slot(*i.dest, lf) : kNoSlot;
          } else {
            li.kind = LInst::Kind::Print;
            li.a = operand(i.operand, lf);
          }
        },
        inst);
    return li;
  }

  SlotIndex slot(const LocalName &name, LFunction &lf) {
    auto [it, inserted] =
        slots_.emplace(name, static_cast<SlotIndex>(lf.slot_names.size()));
    if (inserted)
      lf.slot_names.push_back(name);
    return it->second;
  }

  LOperand operand(const Operand &op, LFunction &lf) {
    LOperand lo;
    if (op.is_local()) {
      lo.is_slot = true;
      lo.slot = slot(op.name(), lf);
    } else {
      lo.imm = op.literal();
    }
    return lo;
  }

  const Program &program_;
  LoweredProgram &out_;
  std::unordered_map<LocalName, SlotIndex> slots_;
};

} // namespace

LoweredProgram lower(const Program &program) {
  require_valid(program);
  LoweredProgram out;
  Lowering(program, out).run();
  return out;
}

} // namespace munchkin
