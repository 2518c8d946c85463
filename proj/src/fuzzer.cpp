#include "munchkin/fuzzer.hpp"

#include <chrono>

namespace munchkin {

std::string_view to_string(MutationKind k) {
  switch (k) {
  case MutationKind::BitFlip: return "bitflip";
  case MutationKind::AddDelta: return "add";
  case MutationKind::SubDelta: return "sub";
  case MutationKind::Interesting: return "interesting";
  case MutationKind::Duplicate: return "duplicate";
  case MutationKind::Insert: return "insert";
  case MutationKind::Delete: return "delete";
  }
  return "?";
}

const std::vector<std::int32_t> &interesting_values() {
  static const std::vector<std::int32_t> values = [] {
    std::vector<std::int32_t> v{0, 1, -1, INT32_MIN, INT32_MAX};
    for (int k = 1; k <= 30; ++k) {
      v.push_back((1 << k) - 1);
      v.push_back((1 << k) + 1);
    }
    return v;
  }();
  return values;
}

void apply_mutation(InputVector &input, const Mutation &m) {
  if (m.kind == MutationKind::Insert) {
    auto pos = m.position % (input.size() + 1);
    input.insert(input.begin() + static_cast<std::ptrdiff_t>(pos), m.value);
    return;
  }
  if (input.empty())
    return;
  auto pos = m.position % input.size();
  auto &slot = input[pos];
  auto wrap_add = [](std::int32_t a, std::int32_t b) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) +
                                     static_cast<std::uint32_t>(b));
  };
  switch (m.kind) {
  case MutationKind::BitFlip:
    slot = static_cast<std::int32_t>(static_cast<std::uint32_t>(slot) ^
                                     (1u << (static_cast<std::uint32_t>(m.value) & 31u)));
    break;
  case MutationKind::AddDelta:
    slot = wrap_add(slot, m.value);
    break;
  case MutationKind::SubDelta:
    slot = wrap_add(slot, static_cast<std::int32_t>(0u - static_cast<std::uint32_t>(m.value)));
    break;
  case MutationKind::Interesting:
    slot = m.value;
    break;
  case MutationKind::Duplicate:
    input.insert(input.begin() + static_cast<std::ptrdiff_t>(pos) + 1, slot);
    break;
  case MutationKind::Delete:
    input.erase(input.begin() + static_cast<std::ptrdiff_t>(pos));
    break;
  case MutationKind::Insert:
    break;
  }
}

Mutation Mutator::draw(const InputVector &input) {
  Mutation m;
  m.kind = static_cast<MutationKind>(below(kMutationKinds));
  m.position = static_cast<std::size_t>(below(input.size() + 1));
  const auto &interesting = interesting_values();
  switch (m.kind) {
  case MutationKind::BitFlip:
    m.value = static_cast<std::int32_t>(below(32));
    break;
  case MutationKind::AddDelta:
  case MutationKind::SubDelta:
    m.value = 1 + static_cast<std::int32_t>(below(kMaxDelta));
    break;
  case MutationKind::Interesting:
    m.value = interesting[below(interesting.size())];
    break;
  case MutationKind::Insert:
    m.value = below(2) ? interesting[below(interesting.size())]
                       : static_cast<std::int32_t>(below(513)) - 256;
    break;
  default:
    break;
  }
  return m;
}

InputVector Mutator::mutate(const InputVector &input,
                            std::vector<MutationKind> *applied) {
  InputVector out = input;
  const auto n = 1 + below(stacking_);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto m = draw(out);
    if (applied)
      applied->push_back(m.kind);
    apply_mutation(out, m);
  }
  return out;
}

FuzzResult fuzz_campaign(const LoweredProgram &program,
                         std::vector<InputVector> seeds, const FuzzConfig &cfg) {
  if (seeds.empty())
    seeds.push_back({0});

  FuzzResult result;
  std::bitset<kEdgeMapBits> fault_bits;
  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (!cfg.wall_clock_seconds)
      return false;
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    return elapsed.count() >= *cfg.wall_clock_seconds;
  };

  auto execute = [&](const InputVector &input, std::uint64_t iteration) {
    auto run = run_concrete(program, input, cfg.step_limit);
    ++result.executions;
    if (run.outcome != Outcome::Completed &&
        (run.coverage.edge_bits & ~fault_bits).any()) {
      fault_bits |= run.coverage.edge_bits;
      result.faults.push_back({input, run.outcome});
    }
    for (const auto &fn : run.coverage.functions)
      if (!result.cumulative.functions.count(fn))
        result.function_witnesses.emplace(fn, input);
    if (result.cumulative.has_new_edges(run.coverage)) {
      result.cumulative.merge(run.coverage);
      result.corpus.push_back({input, std::move(run.coverage), iteration});
    } else {
      result.cumulative.merge(run.coverage);
    }
  };

  for (const auto &s : seeds)
    execute(s, 0);

  Mutator mutator(cfg.rng_seed, cfg.havoc_stacking);
  for (std::uint64_t it = 0; it < cfg.budget; ++it) {
    if (out_of_time())
      break;
    // Copy: execute() may grow the corpus.
    InputVector parent = result.corpus[it % result.corpus.size()].input;
    execute(mutator.mutate(parent), it + 1);
  }
  return result;
}

} // namespace munchkin
