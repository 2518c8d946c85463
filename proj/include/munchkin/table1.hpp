//===-- table1.hpp - The twelve generated-program comparison --------------===//
#pragma once

#include "munchkin/orchestrator.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace munchkin {

/// (branching, depth) of programs P1..P12.
inline constexpr std::array<std::pair<std::uint32_t, std::uint32_t>, 12> kTable1Params{{
    {2, 1}, {2, 2}, {2, 3}, {2, 4},
    {3, 1}, {3, 2}, {3, 3}, {3, 4},
    {4, 1}, {4, 2}, {4, 3}, {4, 4},
}};

struct Table1Row {
  std::string id;
  std::uint32_t branching = 0;
  std::uint32_t depth = 0;
  std::size_t total_functions = 0;
  double fuzz_percent = 0;
  double symex_percent = 0;
  double fs_percent = 0;
  double sf_percent = 0;
  std::uint64_t symex_queries = 0;
  std::uint64_t fs_queries = 0;
};

/// Runs all four techniques on every program with `base` (its mode is
/// overridden per technique).
std::vector<Table1Row> run_table1(const HybridConfig &base);

/// Fixed-width text table, one line per program.
std::string render_table1(const std::vector<Table1Row> &rows);

} // namespace munchkin
