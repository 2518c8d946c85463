//===-- fuzzer.hpp - Deterministic coverage-guided mutational fuzzer ------===//
//
// Inputs are mutated at the int32 level. A mutant enters the corpus iff it
// sets an edge bit no earlier execution set. Corpus entries are scheduled
// round-robin with constant energy (one mutant per turn).
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/executor.hpp"
#include "munchkin/lowered.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace munchkin {

struct FuzzConfig {
  std::uint64_t rng_seed = 0;
  /// Executions after the seeds have run.
  std::uint64_t budget = 1000;
  std::uint64_t step_limit = kDefaultStepLimit;
  std::uint32_t havoc_stacking = 4;
  /// Optional secondary stop condition; off unless set.
  std::optional<double> wall_clock_seconds;
};

struct CorpusEntry {
  InputVector input;
  CoverageMap coverage;
  /// 0 for seeds, otherwise the 1-based mutation iteration.
  std::uint64_t discovery_iteration = 0;
};

struct FuzzFault {
  InputVector input;
  Outcome outcome = Outcome::ArithmeticFault;
  friend bool operator==(const FuzzFault &, const FuzzFault &) = default;
};

struct FuzzResult {
  std::vector<CorpusEntry> corpus;
  CoverageMap cumulative;
  std::uint64_t executions = 0;
  /// Faulting inputs that reached fault-path edges not seen in earlier faults.
  std::vector<FuzzFault> faults;
  /// First executed input that entered each covered function (edge-map
  /// collisions may keep such an input out of the corpus).
  std::map<FunctionName, InputVector> function_witnesses;
};

enum class MutationKind {
  BitFlip,
  AddDelta,
  SubDelta,
  Interesting,
  Duplicate,
  Insert,
  Delete
};
inline constexpr std::size_t kMutationKinds = 7;
std::string_view to_string(MutationKind k);

inline constexpr std::int32_t kMaxDelta = 35;

/// One concrete edit. `position` is reduced modulo the input length (modulo
/// length + 1 for Insert); `value` is the bit index, delta, constant or
/// inserted value depending on `kind`. Edits that need an element are no-ops
/// on an empty input.
struct Mutation {
  MutationKind kind = MutationKind::BitFlip;
  std::size_t position = 0;
  std::int32_t value = 0;
};

void apply_mutation(InputVector &input, const Mutation &m);

/// {0, 1, -1, INT32_MIN, INT32_MAX} followed by 2^k - 1 and 2^k + 1 for
/// k = 1..30.
const std::vector<std::int32_t> &interesting_values();

class Mutator {
public:
  Mutator(std::uint64_t seed, std::uint32_t havoc_stacking)
      : rng_(seed), stacking_(havoc_stacking == 0 ? 1 : havoc_stacking) {}

  Mutation draw(const InputVector &input);
  /// Applies 1..havoc_stacking random edits. `applied`, when given, receives
  /// the kind of every edit drawn.
  InputVector mutate(const InputVector &input,
                     std::vector<MutationKind> *applied = nullptr);

  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }

private:
  std::mt19937_64 rng_;
  std::uint32_t stacking_;
};

/// An empty seed list is replaced by the single seed [0]. Deterministic in
/// (program, seeds, cfg) unless a wall-clock cap is set.
FuzzResult fuzz_campaign(const LoweredProgram &program,
                         std::vector<InputVector> seeds, const FuzzConfig &cfg);

} // namespace munchkin
