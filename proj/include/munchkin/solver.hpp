//===-- solver.hpp - Interval-propagation solver for linear int32 ---------===//
//
// Decision procedure:
//   1. Bounds propagation over constraints whose sides provably do not wrap
//      under the current domains (sound for those constraints).
//   2. Candidate model: the value closest to zero in every domain.
//   3. Small repair search around the candidate.
//   4. Exhaustive enumeration when the propagated box has at most
//      `enumeration_cap` points; this is exact under wrap-around semantics.
// Opaque terms make the answer Unknown unless the remaining constraints are
// already Unsat.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/symbolic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace munchkin {

enum class SolveStatus { Sat, Unsat, Unknown };
std::string_view to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  /// Sat: a model satisfying every constraint. Unknown: a best-effort
  /// candidate (may violate constraints). Unsat: empty.
  InputVector model;
};

struct SolverStats {
  std::uint64_t queries = 0;
  std::uint64_t sat = 0;
  std::uint64_t unsat = 0;
  std::uint64_t unknown = 0;
  std::uint64_t cache_hits = 0;

  SolverStats &operator+=(const SolverStats &o);
  friend SolverStats operator-(SolverStats a, const SolverStats &b);
  friend bool operator==(const SolverStats &, const SolverStats &) = default;
};

struct SolverOptions {
  std::uint64_t enumeration_cap = 1u << 16;
  std::uint32_t propagation_rounds = 64;
  bool use_cache = true;
};

/// Stateless decision procedure; does not touch any statistics.
SolveResult solve_uncached(const PathCondition &pc, std::size_t num_vars,
                           const SolverOptions &opts = {});

/// Counting, caching front end. Each call to solve() that misses the cache
/// is one query; hits only bump cache_hits. Not thread-safe.
class Solver {
public:
  explicit Solver(SolverOptions opts = {}) : opts_(opts) {}

  SolveResult solve(const PathCondition &pc, std::size_t num_vars);
  /// Cache probe only. Counts a hit; never issues a query.
  std::optional<SolveResult> lookup(const PathCondition &pc,
                                    std::size_t num_vars);

  const SolverStats &stats() const { return stats_; }
  std::size_t cache_size() const { return cache_.size(); }

private:
  static std::string key(const PathCondition &pc, std::size_t num_vars);

  SolverOptions opts_;
  SolverStats stats_;
  std::unordered_map<std::string, SolveResult> cache_;
};

} // namespace munchkin
