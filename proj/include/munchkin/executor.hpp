//===-- executor.hpp - Concrete interpreter with coverage -----------------===//
#pragma once

#include "munchkin/ir.hpp"
#include "munchkin/lowered.hpp"

#include <bitset>
#include <optional>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace munchkin {

inline constexpr std::size_t kEdgeMapBits = 1u << 16;

/// Function-entry set plus an AFL-style edge bitmap. A function counts as
/// covered once it has been entered.
struct CoverageMap {
  std::set<FunctionName> functions;
  std::bitset<kEdgeMapBits> edge_bits;

  std::size_t edge_count() const { return edge_bits.count(); }
  /// True if `other` has an edge bit that is unset here.
  bool has_new_edges(const CoverageMap &other) const {
    return (other.edge_bits & ~edge_bits).any();
  }
  void merge(const CoverageMap &other);

  friend bool operator==(const CoverageMap &, const CoverageMap &) = default;
};

/// Commutative, associative and idempotent.
CoverageMap merge_coverage(const CoverageMap &a, const CoverageMap &b);

enum class Outcome { Completed, ArithmeticFault, StepLimitExceeded };
std::string_view to_string(Outcome o);

struct RunResult {
  CoverageMap coverage;
  Outcome outcome = Outcome::Completed;
  std::vector<std::int32_t> printed;
  std::uint64_t steps = 0;
  /// Value returned by main, when it returned one.
  std::optional<std::int32_t> exit_value;

  friend bool operator==(const RunResult &, const RunResult &) = default;
};

inline constexpr std::uint64_t kDefaultStepLimit = 1'000'000;

/// Runs main on `input`. ReadInput consumes values in order and yields 0 once
/// the vector is exhausted. Each executed instruction or terminator is one
/// step; hitting `step_limit` stops the run.
RunResult run_concrete(const LoweredProgram &program, const InputVector &input,
                       std::uint64_t step_limit = kDefaultStepLimit);

/// Convenience overload; lowers the program on every call.
RunResult run_concrete(const Program &program, const InputVector &input,
                       std::uint64_t step_limit = kDefaultStepLimit);

/// int32 arithmetic with wrap-around. Returns false for division or modulo
/// by zero.
bool apply_binop(BinOpKind op, std::int32_t lhs, std::int32_t rhs,
                 std::int32_t &out);

} // namespace munchkin
