#include "munchkin/symex.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace munchkin {

std::string_view to_string(SearchStrategy s) {
  return s == SearchStrategy::Sonar ? "sonar" : "baseline";
}

std::optional<SearchStrategy> parse_search(std::string_view text) {
  if (text == "baseline")
    return SearchStrategy::Baseline;
  if (text == "sonar")
    return SearchStrategy::Sonar;
  return std::nullopt;
}

std::size_t select_next_state(std::span<const SymState> frontier,
                              SearchStrategy search, const DistanceField *df,
                              std::mt19937_64 &rng) {
  if (frontier.empty())
    throw std::invalid_argument("empty frontier");
  if (search == SearchStrategy::Baseline || df == nullptr)
    return static_cast<std::size_t>(rng() % frontier.size());
  auto key = [&](const SymState &s) {
    return std::tuple(df->at(s.function(), s.block()), s.queries_charged, s.id);
  };
  std::size_t best = 0;
  auto best_key = key(frontier[0]);
  for (std::size_t i = 1; i < frontier.size(); ++i) {
    auto k = key(frontier[i]);
    if (k < best_key) {
      best = i;
      best_key = k;
    }
  }
  return best;
}

namespace {

class Engine {
public:
  Engine(const LoweredProgram &program, const SymexConfig &cfg, Solver &solver,
         DistanceCache *distances)
      : program_(program), cfg_(cfg), solver_(solver),
        start_stats_(solver.stats()), rng_(cfg.rng_seed),
        emitted_(program.functions.size(), false) {
    if (cfg.limits.max_states == 0 || cfg.limits.max_queries == 0 ||
        cfg.limits.step_limit == 0)
      throw std::invalid_argument("symex limits must be positive");
    if (cfg.target)
      target_ = program.function_index(*cfg.target);
    if (cfg.search == SearchStrategy::Sonar) {
      if (!target_)
        throw std::invalid_argument("sonar search requires a target");
      if (distances) {
        distances_ = distances->get(*cfg.target);
      } else {
        distances_ = std::make_shared<const DistanceField>(
            sonar_distances(program, *cfg.target));
      }
    }
  }

  SymResult run() {
    SymState init;
    init.id = next_id_++;
    const auto &main_fn = program_.functions[program_.main];
    init.stack.push_back(
        {program_.main, main_fn.entry, 0,
         std::vector<SymValue>(main_fn.num_slots), kNoSlot});
    init.entered.push_back(program_.main);

    if (is_target(program_.main)) {
      reach_target(init);
    } else {
      frontier_.push_back(std::move(init));
    }

    const auto started = std::chrono::steady_clock::now();
    while (!frontier_.empty() && !halted_) {
      if (result_.states_explored >= cfg_.limits.max_states)
        break;
      if (cfg_.limits.wall_clock_seconds) {
        std::chrono::duration<double> elapsed =
            std::chrono::steady_clock::now() - started;
        if (elapsed.count() >= *cfg_.limits.wall_clock_seconds)
          break;
      }
      auto idx = select_next_state(frontier_, cfg_.search, distances_.get(), rng_);
      SymState s = std::move(frontier_[idx]);
      if (idx + 1 != frontier_.size())
        frontier_[idx] = std::move(frontier_.back());
      frontier_.pop_back();
      ++result_.states_explored;
      execute(std::move(s));
    }
    result_.stats = solver_.stats() - start_stats_;
    return std::move(result_);
  }

private:
  struct Check {
    bool feasible = false;
    PathCondition pc;
    InputVector model;
  };

  bool is_target(FuncIndex fn) const {
    return cfg_.search == SearchStrategy::Sonar && target_ && *target_ == fn;
  }

  std::uint64_t queries_used() const {
    return solver_.stats().queries - start_stats_.queries;
  }

  // nullopt means the query budget ran out; the campaign halts.
  std::optional<Check> check(SymState &s, Constraint c) {
    Check out;
    out.pc = s.pc.with(std::move(c));
    std::size_t nv = std::max<std::size_t>(s.inputs_read, out.pc.num_vars());
    auto r = solver_.lookup(out.pc, nv);
    if (!r) {
      if (queries_used() >= cfg_.limits.max_queries) {
        halted_ = true;
        return std::nullopt;
      }
      r = solver_.solve(out.pc, nv);
      ++s.queries_charged;
    }
    if (r->status == SolveStatus::Unsat)
      return out;
    out.feasible = true;
    out.model = std::move(r->model);
    if (out.model.size() < s.inputs_read)
      out.model.resize(s.inputs_read, 0);
    return out;
  }

  static SymValue read(const SymFrame &f, const LOperand &op) {
    return op.is_slot ? f.slots[op.slot] : SymValue::constant(op.imm);
  }

  void enter(SymState &s, FuncIndex fn) {
    auto it = std::lower_bound(s.entered.begin(), s.entered.end(), fn);
    if (it == s.entered.end() || *it != fn)
      s.entered.insert(it, fn);
  }

  void execute(SymState s) {
    while (!halted_) {
      if (s.steps >= cfg_.limits.step_limit) {
        emit(s, false);
        return;
      }
      ++s.steps;
      SymFrame &f = s.stack.back();
      const LBlock &block = program_.functions[f.fn].blocks[f.block];

      if (f.ip < block.insts.size()) {
        const LInst &inst = block.insts[f.ip++];
        switch (inst.kind) {
        case LInst::Kind::Const:
          f.slots[inst.dest] = SymValue::constant(inst.a.imm);
          break;
        case LInst::Kind::Input:
          if (s.inputs_read < cfg_.max_inputs) {
            f.slots[inst.dest] = SymValue::variable(s.inputs_read++);
            s.model.resize(s.inputs_read, 0);
          } else {
            f.slots[inst.dest] = SymValue::constant(0);
          }
          break;
        case LInst::Kind::BinOp:
          if (!binop(s, inst))
            return;
          break;
        case LInst::Kind::Print:
          break;
        case LInst::Kind::Call: {
          const auto &callee = program_.functions[inst.callee];
          SymFrame frame{inst.callee, callee.entry, 0,
                         std::vector<SymValue>(callee.num_slots), inst.dest};
          for (std::size_t i = 0; i < inst.args.size(); ++i)
            frame.slots[i] = read(f, inst.args[i]);
          s.stack.push_back(std::move(frame)); // invalidates f
          enter(s, inst.callee);
          if (is_target(inst.callee)) {
            reach_target(s);
            return;
          }
          break;
        }
        }
        continue;
      }

      const LTerm &term = block.term;
      if (term.kind == LTerm::Kind::Jump) {
        f.block = term.then_block;
        f.ip = 0;
        continue;
      }
      if (term.kind == LTerm::Kind::Return) {
        SymValue value = term.has_value ? read(f, term.a) : SymValue::constant(0);
        SlotIndex dest = f.ret_dest;
        s.stack.pop_back();
        if (s.stack.empty()) {
          emit(s, false);
          return;
        }
        if (dest != kNoSlot)
          s.stack.back().slots[dest] = std::move(value);
        continue;
      }

      SymValue lhs = read(f, term.a);
      SymValue rhs = read(f, term.b);
      if (lhs.is_constant() && rhs.is_constant()) {
        f.block = evaluate(term.cmp, lhs.constant_term(), rhs.constant_term())
                      ? term.then_block
                      : term.else_block;
        f.ip = 0;
        continue;
      }
      Constraint taken{term.cmp, lhs, rhs};
      auto then_check = check(s, taken);
      if (!then_check)
        return;
      auto else_check = check(s, taken.negated());
      if (!else_check)
        return;

      auto successor = [&](SymState child, Check &c, BlockIndex target) {
        child.pc = std::move(c.pc);
        child.model = std::move(c.model);
        child.stack.back().block = target;
        child.stack.back().ip = 0;
        return child;
      };
      if (then_check->feasible && else_check->feasible) {
        SymState other = s;
        other.id = next_id_++;
        frontier_.push_back(successor(std::move(other), *else_check, term.else_block));
        s.id = next_id_++;
        frontier_.push_back(successor(std::move(s), *then_check, term.then_block));
        return;
      }
      if (then_check->feasible) {
        s = successor(std::move(s), *then_check, term.then_block);
      } else if (else_check->feasible) {
        s = successor(std::move(s), *else_check, term.else_block);
      } else {
        return; // both sides infeasible: only possible with an Unknown parent
      }
    }
  }

  // Returns false when the state is gone (fault or budget exhaustion).
  bool binop(SymState &s, const LInst &inst) {
    SymFrame &f = s.stack.back();
    SymValue a = read(f, inst.a);
    SymValue b = read(f, inst.b);
    const bool divides = inst.op == BinOpKind::Div || inst.op == BinOpKind::Mod;
    if (divides && b.is_constant() && b.constant_term() == 0) {
      emit(s, false);
      return false;
    }
    if (divides && !b.is_constant()) {
      Constraint zero{CmpKind::Eq, b, SymValue::constant(0)};
      auto zero_check = check(s, zero);
      if (!zero_check)
        return false;
      auto nonzero_check = check(s, zero.negated());
      if (!nonzero_check)
        return false;
      if (zero_check->feasible) {
        SymState faulting = s;
        faulting.id = next_id_++;
        faulting.pc = std::move(zero_check->pc);
        faulting.model = std::move(zero_check->model);
        emit(faulting, false);
      }
      if (!nonzero_check->feasible)
        return false;
      s.pc = std::move(nonzero_check->pc);
      s.model = std::move(nonzero_check->model);
    }
    s.stack.back().slots[inst.dest] = SymValue::binop(inst.op, a, b);
    return true;
  }

  void reach_target(SymState &s) {
    result_.target_reached = true;
    emit(s, true);
    halted_ = true;
  }

  void emit(const SymState &s, bool force) {
    bool fresh = std::any_of(s.entered.begin(), s.entered.end(),
                             [&](FuncIndex fn) { return !emitted_[fn]; });
    if (!fresh && !force)
      return;
    InputVector input = s.model;
    input.resize(s.inputs_read, 0);
    auto replay = run_concrete(program_, input, cfg_.limits.step_limit);
    SymTestCase tc;
    tc.input = std::move(input);
    for (FuncIndex fn : s.entered) {
      const auto &name = program_.functions[fn].name;
      if (replay.coverage.functions.count(name)) {
        tc.covering.insert(name);
        emitted_[fn] = true;
      } else {
        ++result_.replay_mismatches;
      }
    }
    result_.coverage.merge(replay.coverage);
    result_.test_cases.push_back(std::move(tc));
  }

  const LoweredProgram &program_;
  const SymexConfig &cfg_;
  Solver &solver_;
  SolverStats start_stats_;
  std::mt19937_64 rng_;
  std::optional<FuncIndex> target_;
  std::shared_ptr<const DistanceField> distances_;
  std::vector<SymState> frontier_;
  std::vector<bool> emitted_;
  std::uint64_t next_id_ = 0;
  bool halted_ = false;
  SymResult result_;
};

} // namespace

SymResult symex_campaign(const LoweredProgram &program, const SymexConfig &cfg,
                         Solver *solver, DistanceCache *distances) {
  Solver local;
  Engine engine(program, cfg, solver ? *solver : local, distances);
  return engine.run();
}

} // namespace munchkin
