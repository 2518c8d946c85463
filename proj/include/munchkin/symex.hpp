//===-- symex.hpp - Forking symbolic execution over the IR ----------------===//
//
// Every ReadInput (up to max_inputs) introduces a fresh symbolic variable.
// At a branch whose operands are not both constant, each successor's path
// condition is checked with one solver query and infeasible successors are
// dropped on the spot. A state that covers a function no earlier test case
// covered emits a test case when it terminates; under the sonar strategy,
// entering the target emits one and ends the campaign. Every emitted input
// is replayed concretely and only replay-confirmed functions are credited.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/callgraph.hpp"
#include "munchkin/executor.hpp"
#include "munchkin/lowered.hpp"
#include "munchkin/solver.hpp"
#include "munchkin/symbolic.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <vector>

namespace munchkin {

enum class SearchStrategy { Baseline, Sonar };
std::string_view to_string(SearchStrategy s);
std::optional<SearchStrategy> parse_search(std::string_view text);

struct SymexLimits {
  /// States taken off the frontier.
  std::uint64_t max_states = 100'000;
  /// Solver queries issued by this campaign (cache hits are free).
  std::uint64_t max_queries = 100'000;
  /// Instructions per state before it is killed.
  std::uint64_t step_limit = kDefaultStepLimit;
  /// Optional wall-clock cap; off unless set.
  std::optional<double> wall_clock_seconds;
};

struct SymexConfig {
  SearchStrategy search = SearchStrategy::Baseline;
  SymexLimits limits;
  std::uint32_t max_inputs = 4;
  /// Required for sonar.
  std::optional<FunctionName> target;
  std::uint64_t rng_seed = 0;
};

struct SymFrame {
  FuncIndex fn = 0;
  BlockIndex block = 0;
  std::size_t ip = 0;
  std::vector<SymValue> slots;
  SlotIndex ret_dest = kNoSlot;
};

struct SymState {
  /// Creation order; the FIFO tie-break.
  std::uint64_t id = 0;
  std::vector<SymFrame> stack;
  PathCondition pc;
  std::uint32_t inputs_read = 0;
  std::uint64_t queries_charged = 0;
  std::uint64_t steps = 0;
  /// A model of pc (extended with 0 for variables read since).
  InputVector model;
  /// Functions entered along this path, sorted.
  std::vector<FuncIndex> entered;

  FuncIndex function() const { return stack.back().fn; }
  BlockIndex block() const { return stack.back().block; }
};

/// Baseline: uniform over the frontier. Sonar: smallest distance at the
/// state's current block, then fewest queries charged, then lowest id.
/// Returns an index into `frontier`, which must be non-empty.
std::size_t select_next_state(std::span<const SymState> frontier,
                              SearchStrategy search, const DistanceField *df,
                              std::mt19937_64 &rng);

struct SymTestCase {
  InputVector input;
  std::set<FunctionName> covering;
};

struct SymResult {
  std::vector<SymTestCase> test_cases;
  /// Union of the replay coverage of all test cases.
  CoverageMap coverage;
  /// Queries issued by this campaign only.
  SolverStats stats;
  std::uint64_t states_explored = 0;
  bool target_reached = false;
  /// Functions a state claimed but its replay did not enter.
  std::uint64_t replay_mismatches = 0;
};

/// `solver` and `distances` may be shared with other campaigns on the same
/// program; when null, private ones are used. Throws std::invalid_argument
/// for zero limits or a sonar run without a target and std::out_of_range
/// for an unknown target.
SymResult symex_campaign(const LoweredProgram &program, const SymexConfig &cfg,
                         Solver *solver = nullptr,
                         DistanceCache *distances = nullptr);

} // namespace munchkin
