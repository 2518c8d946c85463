#include "munchkin/executor.hpp"
#include "munchkin/generator.hpp"

#include <doctest.h>

#include <ostream>

using namespace munchkin;

namespace {

std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--)
    r *= b;
  return r;
}

// Walks the dispatch tree by range arithmetic alone.
std::set<FunctionName> trace(std::uint32_t b, std::uint32_t d, std::int64_t v) {
  std::set<FunctionName> fns{"main"};
  std::int64_t lo = 0, hi = static_cast<std::int64_t>(ipow(b, d)) - 1;
  if (v < lo || v > hi)
    return fns;
  while (lo < hi) {
    fns.insert("node_" + std::to_string(lo) + "_" + std::to_string(hi));
    std::int64_t width = (hi - lo + 1) / b;
    std::int64_t k = (v - lo) / width;
    lo += k * width;
    hi = lo + width - 1;
  }
  fns.insert("leaf_" + std::to_string(v));
  return fns;
}

} // namespace

TEST_CASE("function counts") {
  CHECK(generate_program({2, 3, 0}).functions.size() == 16);
  CHECK(generate_program({2, 1, 0}).functions.size() == 4);
  CHECK(generate_program({3, 4, 0}).functions.size() == 122);
  CHECK(generate_program({4, 4, 0}).functions.size() == 342);
  for (std::uint32_t b = 2; b <= 6; ++b)
    for (std::uint32_t d = 1; d <= 4; ++d) {
      std::uint64_t sum = 1;
      for (std::uint32_t i = 0; i <= d; ++i)
        sum += ipow(b, i);
      CHECK(expected_function_count(b, d) == sum);
      CHECK(generate_program({b, d, 0}).functions.size() == sum);
    }
}

TEST_CASE("parameter bounds") {
  CHECK_THROWS_AS(generate_program({1, 3, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate_program({17, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate_program({2, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate_program({2, 13, 0}), std::invalid_argument);
  CHECK_THROWS_AS(generate_program({16, 5, 0}), std::invalid_argument);
  CHECK_NOTHROW(check_params({2, 12, 0}));
}

TEST_CASE("valid inputs span [0, b^d - 1]") {
  CHECK(input_range_size({2, 3, 0}) == 8);
  auto p = generate_program({2, 3, 0});
  CHECK(run_concrete(p, {7}).printed == std::vector<std::int32_t>{7});
  CHECK(run_concrete(p, {8}).printed == std::vector<std::int32_t>{-1});
  CHECK(run_concrete(p, {-1}).exit_value == 1);
}

TEST_CASE("ground truth for (2,3)") {
  GenParams g{2, 3, 0};
  CHECK(ground_truth_for(g, 5) ==
        std::set<FunctionName>{"main", "node_0_7", "node_4_7", "node_4_5", "leaf_5"});
  CHECK(ground_truth_for(g, -1) == std::set<FunctionName>{"main"});

  std::set<FunctionName> all;
  for (int v = -1; v <= 8; ++v)
    for (const auto &f : ground_truth_for(g, v))
      all.insert(f);
  std::set<FunctionName> names;
  for (const auto &[n, _] : generate_program(g).functions)
    names.insert(n);
  CHECK(all == names);
}

TEST_CASE("ground truth agrees with range trace and interpreter") {
  for (std::uint32_t b = 2; b <= 4; ++b)
    for (std::uint32_t d = 1; d <= 3; ++d) {
      GenParams g{b, d, 0};
      auto p = generate_program(g);
      auto truth = ground_truth_coverage(g);
      CHECK(truth.size() == ipow(b, d));
      for (const auto &[v, fns] : truth) {
        CHECK(fns == trace(b, d, v));
        CHECK(run_concrete(p, {v}).coverage.functions == fns);
      }
    }
}

TEST_CASE("ground truth refuses oversized ranges") {
  CHECK_THROWS(ground_truth_coverage({4, 9, 0}));
}

TEST_CASE("child ranges partition the parent") {
  for (std::int64_t lo : {0, 3, 10})
    for (std::int64_t size : {4, 7, 9, 16})
      for (std::uint32_t parts : {2u, 3u, 4u}) {
        if (size < parts)
          continue;
        auto ranges = split_range(lo, lo + size - 1, parts);
        REQUIRE(ranges.size() == parts);
        CHECK(ranges.front().first == lo);
        CHECK(ranges.back().second == lo + size - 1);
        for (std::size_t i = 1; i < ranges.size(); ++i) {
          CHECK(ranges[i].first == ranges[i - 1].second + 1);
          auto w0 = ranges[i - 1].second - ranges[i - 1].first;
          auto w1 = ranges[i].second - ranges[i].first;
          CHECK(w0 >= w1);
        }
      }
}

TEST_CASE("seed salts names deterministically") {
  auto a = generate_program({2, 2, 42});
  auto b = generate_program({2, 2, 42});
  auto c = generate_program({2, 2, 43});
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(a.functions.count("main") == 1);
  CHECK(node_name({2, 2, 42}, 0, 3) != "node_0_3");
  CHECK(a.functions.count(node_name({2, 2, 42}, 0, 3)) == 1);
  CHECK(ground_truth_for({2, 2, 42}, 2).count(leaf_name({2, 2, 42}, 2)) == 1);
}
