#include "munchkin/ir.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace munchkin {

std::string_view to_string(BinOpKind op) {
  switch (op) {
  case BinOpKind::Add: return "add";
  case BinOpKind::Sub: return "sub";
  case BinOpKind::Mul: return "mul";
  case BinOpKind::Div: return "div";
  case BinOpKind::Mod: return "mod";
  }
  return "?";
}

std::string_view to_string(CmpKind cmp) {
  switch (cmp) {
  case CmpKind::Lt: return "lt";
  case CmpKind::Le: return "le";
  case CmpKind::Eq: return "eq";
  case CmpKind::Ne: return "ne";
  case CmpKind::Ge: return "ge";
  case CmpKind::Gt: return "gt";
  }
  return "?";
}

std::optional<BinOpKind> parse_binop(std::string_view text) {
  for (auto op : {BinOpKind::Add, BinOpKind::Sub, BinOpKind::Mul,
                  BinOpKind::Div, BinOpKind::Mod})
    if (to_string(op) == text)
      return op;
  return std::nullopt;
}

std::optional<CmpKind> parse_cmp(std::string_view text) {
  for (auto cmp : {CmpKind::Lt, CmpKind::Le, CmpKind::Eq, CmpKind::Ne,
                   CmpKind::Ge, CmpKind::Gt})
    if (to_string(cmp) == text)
      return cmp;
  return std::nullopt;
}

CmpKind negate(CmpKind cmp) {
  switch (cmp) {
  case CmpKind::Lt: return CmpKind::Ge;
  case CmpKind::Le: return CmpKind::Gt;
  case CmpKind::Eq: return CmpKind::Ne;
  case CmpKind::Ne: return CmpKind::Eq;
  case CmpKind::Ge: return CmpKind::Lt;
  case CmpKind::Gt: return CmpKind::Le;
  }
  return cmp;
}

CmpKind swap_sides(CmpKind cmp) {
  switch (cmp) {
  case CmpKind::Lt: return CmpKind::Gt;
  case CmpKind::Le: return CmpKind::Ge;
  case CmpKind::Ge: return CmpKind::Le;
  case CmpKind::Gt: return CmpKind::Lt;
  default: return cmp;
  }
}

bool evaluate(CmpKind cmp, std::int32_t lhs, std::int32_t rhs) {
  switch (cmp) {
  case CmpKind::Lt: return lhs < rhs;
  case CmpKind::Le: return lhs <= rhs;
  case CmpKind::Eq: return lhs == rhs;
  case CmpKind::Ne: return lhs != rhs;
  case CmpKind::Ge: return lhs >= rhs;
  case CmpKind::Gt: return lhs > rhs;
  }
  return false;
}

std::vector<BlockId> successors(const Terminator &term) {
  if (auto *br = std::get_if<BranchTerm>(&term))
    return {br->then_block, br->else_block};
  if (auto *jmp = std::get_if<JumpTerm>(&term))
    return {jmp->target};
  return {};
}

const Block &Function::block(const BlockId &id) const {
  auto it = blocks.find(id);
  if (it == blocks.end())
    throw std::out_of_range("unknown block '" + id + "' in function '" +
                            name + "'");
  return it->second;
}

const Function &Program::function(const FunctionName &fn) const {
  auto it = functions.find(fn);
  if (it == functions.end())
    throw std::out_of_range("unknown function '" + fn + "'");
  return it->second;
}

namespace {

std::string render(const std::vector<Diagnostic> &diags) {
  std::ostringstream os;
  bool first = true;
  for (const auto &d : diags) {
    if (d.severity != Diagnostic::Severity::Error)
      continue;
    if (!first)
      os << "; ";
    first = false;
    if (!d.where.function.empty()) {
      os << d.where.function;
      if (!d.where.block.empty())
        os << ":" << d.where.block;
      os << ": ";
    }
    os << d.message;
  }
  return os.str();
}

class Validator {
public:
  explicit Validator(const Program &p) : program_(p) {}

  std::vector<Diagnostic> run() {
    auto entry = program_.functions.find(program_.entry);
    if (entry == program_.functions.end()) {
      error({}, "missing entry function '" + program_.entry + "'");
    } else if (!entry->second.params.empty()) {
      error({program_.entry, {}, {}}, "entry function takes parameters");
    }
    for (const auto &[name, fn] : program_.functions) {
      if (name != fn.name)
        error({name, {}, {}}, "function key does not match its name");
      check_function(fn);
    }
    return std::move(diags_);
  }

private:
  void error(IrLocation where, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Error, std::move(where),
                      std::move(msg)});
  }
  void warning(IrLocation where, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Warning, std::move(where),
                      std::move(msg)});
  }

  void check_function(const Function &fn) {
    std::set<LocalName> seen_params;
    for (const auto &p : fn.params)
      if (!seen_params.insert(p).second)
        error({fn.name, {}, {}}, "duplicate parameter '" + p + "'");

    if (!fn.blocks.count(fn.entry_block)) {
      error({fn.name, {}, {}}, "missing entry block '" + fn.entry_block + "'");
      return;
    }

    bool targets_ok = true;
    for (const auto &[id, block] : fn.blocks) {
      if (id != block.id)
        error({fn.name, id, {}}, "block key does not match its id");
      for (std::size_t i = 0; i < block.instructions.size(); ++i)
        if (auto *call = std::get_if<CallInst>(&block.instructions[i]))
          check_call(fn, id, i, *call);
      if (auto *br = std::get_if<BranchTerm>(&block.terminator);
          br && br->then_block == br->else_block)
        error({fn.name, id, {}}, "branch targets must be distinct");
      for (const auto &succ : successors(block.terminator)) {
        if (!fn.blocks.count(succ)) {
          error({fn.name, id, {}}, "unknown branch target '" + succ + "'");
          targets_ok = false;
        }
      }
    }
    if (targets_ok)
      check_definite_assignment(fn);
  }

  void check_call(const Function &fn, const BlockId &block, std::size_t idx,
                  const CallInst &call) {
    auto it = program_.functions.find(call.callee);
    if (it == program_.functions.end()) {
      error({fn.name, block, idx}, "unknown callee '" + call.callee + "'");
      return;
    }
    if (it->second.params.size() != call.args.size())
      error({fn.name, block, idx},
            "arity mismatch calling '" + call.callee + "': expected " +
                std::to_string(it->second.params.size()) + ", got " +
                std::to_string(call.args.size()));
  }

  // Forward must-analysis: a local is usable iff it is assigned on every
  // path from the entry block.
  void check_definite_assignment(const Function &fn) {
    using Set = std::set<LocalName>;
    std::map<BlockId, std::vector<BlockId>> preds;
    std::set<BlockId> reachable;
    std::deque<BlockId> work{fn.entry_block};
    reachable.insert(fn.entry_block);
    while (!work.empty()) {
      auto id = work.front();
      work.pop_front();
      for (const auto &succ : successors(fn.block(id).terminator)) {
        preds[succ].push_back(id);
        if (reachable.insert(succ).second)
          work.push_back(succ);
      }
    }
    for (const auto &[id, _] : fn.blocks)
      if (!reachable.count(id))
        warning({fn.name, id, {}}, "unreachable block '" + id + "'");

    auto transfer = [](const Block &b, Set in) {
      for (const auto &inst : b.instructions)
        std::visit(
            [&](const auto &i) {
              using T = std::decay_t<decltype(i)>;
              if constexpr (std::is_same_v<T, CallInst>) {
                if (i.dest)
                  in.insert(*i.dest);
              } else if constexpr (!std::is_same_v<T, PrintInst>) {
                in.insert(i.dest);
              }
            },
            inst);
      return in;
    };

    std::map<BlockId, std::optional<Set>> out; // nullopt = top
    Set params(fn.params.begin(), fn.params.end());
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto &id : reachable) {
        std::optional<Set> in;
        if (id == fn.entry_block)
          in = params;
        for (const auto &p : preds[id]) {
          const auto &po = out[p];
          if (!po)
            continue;
          if (!in) {
            in = *po;
          } else {
            Set meet;
            std::set_intersection(in->begin(), in->end(), po->begin(),
                                  po->end(), std::inserter(meet, meet.end()));
            in = std::move(meet);
          }
        }
        if (!in)
          continue;
        auto next = transfer(fn.block(id), *in);
        if (out[id] != next) {
          out[id] = std::move(next);
          changed = true;
        }
      }
    }

    for (const auto &id : reachable) {
      Set defined;
      if (id == fn.entry_block)
        defined = params;
      bool first = id != fn.entry_block;
      for (const auto &p : preds[id]) {
        if (!out[p])
          continue;
        if (first) {
          defined = *out[p];
          first = false;
        } else {
          Set meet;
          std::set_intersection(defined.begin(), defined.end(),
                                out[p]->begin(), out[p]->end(),
                                std::inserter(meet, meet.end()));
          defined = std::move(meet);
        }
      }
      const Block &b = fn.block(id);
      auto use = [&](const Operand &op, std::optional<std::size_t> idx) {
        if (op.is_local() && !defined.count(op.name()))
          error({fn.name, id, idx},
                "use of unassigned local '" + op.name() + "'");
      };
      for (std::size_t i = 0; i < b.instructions.size(); ++i) {
        std::visit(
            [&](const auto &inst) {
              using T = std::decay_t<decltype(inst)>;
              if constexpr (std::is_same_v<T, BinOpInst>) {
                use(inst.lhs, i);
                use(inst.rhs, i);
                defined.insert(inst.dest);
              } else if constexpr (std::is_same_v<T, CallInst>) {
                for (const auto &a : inst.args)
                  use(a, i);
                if (inst.dest)
                  defined.insert(*inst.dest);
              } else if constexpr (std::is_same_v<T, PrintInst>) {
                use(inst.operand, i);
              } else {
                defined.insert(inst.dest);
              }
            },
            b.instructions[i]);
      }
      if (auto *br = std::get_if<BranchTerm>(&b.terminator)) {
        use(br->lhs, std::nullopt);
        use(br->rhs, std::nullopt);
      } else if (auto *ret = std::get_if<ReturnTerm>(&b.terminator);
                 ret && ret->value) {
        use(*ret->value, std::nullopt);
      }
    }
  }

  const Program &program_;
  std::vector<Diagnostic> diags_;
};

} // namespace

std::vector<Diagnostic> validate(const Program &program) {
  return Validator(program).run();
}

ValidationError::ValidationError(std::vector<Diagnostic> diags)
    : std::runtime_error("invalid program: " + render(diags)),
      diags_(std::move(diags)) {}

void require_valid(const Program &program) {
  auto diags = validate(program);
  bool has_error =
      std::any_of(diags.begin(), diags.end(), [](const Diagnostic &d) {
        return d.severity == Diagnostic::Severity::Error;
      });
  if (has_error)
    throw ValidationError(std::move(diags));
}

std::size_t count_branches(const Program &program) {
  std::size_t n = 0;
  for (const auto &[_, fn] : program.functions)
    for (const auto &[__, block] : fn.blocks)
      n += std::holds_alternative<BranchTerm>(block.terminator);
  return n;
}

} // namespace munchkin
