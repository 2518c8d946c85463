//===-- generator.hpp - Artificial range-dispatch programs ----------------===//
//
// main reads one integer, rejects anything outside [0, b^d - 1] and hands the
// rest to a complete b-ary tree of range handlers. Each internal handler
// splits its range into b contiguous parts and calls the child that owns the
// input; a leaf owns a single value and prints it.
//
//   depth 0      main
//   depth 1      node_0_{b^d-1}
//   ...
//   depth d+1    leaf_0 ... leaf_{b^d-1}
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/ir.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace munchkin {

struct GenParams {
  std::uint32_t branching = 2;
  std::uint32_t depth = 1;
  /// Non-zero seeds append a deterministic salt to every generated name.
  std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kMaxGeneratedFunctions = 1'000'000;

/// Throws std::invalid_argument unless b in [2,16], d in [1,12] and the
/// program stays within kMaxGeneratedFunctions.
void check_params(const GenParams &params);

/// 1 + (b^(d+1) - 1) / (b - 1).
std::uint64_t expected_function_count(std::uint32_t branching, std::uint32_t depth);

/// b^d, the number of valid inputs.
std::uint64_t input_range_size(const GenParams &params);

Program generate_program(const GenParams &params);

FunctionName node_name(const GenParams &params, std::int64_t lo, std::int64_t hi);
FunctionName leaf_name(const GenParams &params, std::int64_t value);

/// Splits [lo, hi] into `parts` contiguous subranges; earlier parts take
/// the remainder when the size is not divisible. Empty parts are dropped.
std::vector<std::pair<std::int64_t, std::int64_t>>
split_range(std::int64_t lo, std::int64_t hi, std::uint32_t parts);

/// Functions entered on input `value`, by range arithmetic alone.
std::set<FunctionName> ground_truth_for(const GenParams &params,
                                        std::int32_t value);

inline constexpr std::uint64_t kMaxGroundTruthRange = 1u << 16;

/// ground_truth_for over every valid input. Requires b^d <= 2^16.
std::map<std::int32_t, std::set<FunctionName>>
ground_truth_coverage(const GenParams &params);

} // namespace munchkin
