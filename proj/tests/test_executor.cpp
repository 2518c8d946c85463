#include "munchkin/executor.hpp"
#include "munchkin/generator.hpp"
#include "munchkin/lowered.hpp"
#include "munchkin/text_format.hpp"
#include "support/random_program.hpp"

#include <doctest.h>

#include <ostream>

using namespace munchkin;

TEST_CASE("generated (2,3) on input 5 and on empty input") {
  GenParams g{2, 3, 0};
  auto p = generate_program(g);
  auto r = run_concrete(p, {5});
  CHECK(r.outcome == Outcome::Completed);
  CHECK(r.coverage.functions == ground_truth_for(g, 5));
  CHECK(r.printed == std::vector<std::int32_t>{5});

  auto empty = run_concrete(p, {});
  CHECK(empty.coverage.functions == ground_truth_for(g, 0));
  CHECK(empty.printed == std::vector<std::int32_t>{0});
}

TEST_CASE("division by zero is an arithmetic fault") {
  auto p = parse_program("program p\nfunc main()\nblock a:\n  x = const 1\n"
                         "  y = div x 0\n  print y\n  ret\n");
  auto r = run_concrete(p, {});
  CHECK(r.outcome == Outcome::ArithmeticFault);
  CHECK(r.printed.empty());
  CHECK(r.coverage.functions.count("main"));
}

TEST_CASE("wrap-around arithmetic") {
  std::int32_t out = 0;
  CHECK(apply_binop(BinOpKind::Add, INT32_MAX, 1, out));
  CHECK(out == INT32_MIN);
  CHECK(apply_binop(BinOpKind::Mul, 65536, 65536, out));
  CHECK(out == 0);
  CHECK(apply_binop(BinOpKind::Div, INT32_MIN, -1, out));
  CHECK(out == INT32_MIN);
  CHECK(apply_binop(BinOpKind::Mod, INT32_MIN, -1, out));
  CHECK(out == 0);
  CHECK(apply_binop(BinOpKind::Mod, -7, 2, out));
  CHECK(out == -1);
  CHECK_FALSE(apply_binop(BinOpKind::Mod, 1, 0, out));
}

TEST_CASE("step limit stops a loop") {
  auto p = parse_program("program p\nfunc main()\nblock a:\n  i = const 0\n  jmp b\n"
                         "block b:\n  i = add i 1\n  jmp b\n");
  auto r = run_concrete(p, {}, 1000);
  CHECK(r.outcome == Outcome::StepLimitExceeded);
  CHECK(r.steps <= 1000);
}

TEST_CASE("edge hash is the documented function") {
  auto h = [](const std::string &fn, const std::string &block) {
    std::uint32_t x = 2166136261u;
    auto mix = [&](unsigned char c) { x = (x ^ c) * 16777619u; };
    for (unsigned char c : fn)
      mix(c);
    mix(0);
    for (unsigned char c : block)
      mix(c);
    return x;
  };
  CHECK(location_hash("main", "entry") == h("main", "entry"));
  auto prev = h("main", "entry"), cur = h("node_0_1", "entry");
  CHECK(edge_index(prev, cur) == (((prev >> 1) ^ cur) & 0xFFFFu));

  // (2,1) input 1: main.entry, main.check_upper, main.dispatch, node entry,
  // node child_1, leaf_1 entry, back to node child_1, back to main dispatch.
  auto p = generate_program({2, 1, 0});
  std::vector<std::pair<std::string, std::string>> path{
      {"main", "entry"},    {"main", "check_upper"}, {"main", "dispatch"},
      {"node_0_1", "entry"}, {"node_0_1", "child_1"}, {"leaf_1", "entry"},
      {"node_0_1", "child_1"}, {"main", "dispatch"}};
  std::bitset<kEdgeMapBits> expect;
  std::uint32_t last = 0;
  for (const auto &[f, b] : path) {
    auto cur2 = h(f, b);
    expect.set(edge_index(last, cur2));
    last = cur2;
  }
  CHECK(run_concrete(p, {1}).coverage.edge_bits == expect);
}

TEST_CASE("merge laws") {
  auto p = generate_program({2, 2, 0});
  auto a = run_concrete(p, {1}).coverage;
  auto b = run_concrete(p, {2}).coverage;
  auto c = run_concrete(p, {-5}).coverage;
  CoverageMap empty;
  auto eq = [](const CoverageMap &x, const CoverageMap &y) {
    return x.functions == y.functions && x.edge_bits == y.edge_bits;
  };
  CHECK(eq(merge_coverage(a, empty), a));
  CHECK(eq(merge_coverage(a, a), a));
  CHECK(eq(merge_coverage(a, b), merge_coverage(b, a)));
  CHECK(eq(merge_coverage(merge_coverage(a, b), c), merge_coverage(a, merge_coverage(b, c))));
  CHECK(merge_coverage(a, b).edge_count() == (a.edge_bits | b.edge_bits).count());

  CoverageMap all;
  for (const auto &[v, _] : ground_truth_coverage({2, 2, 0}))
    all.merge(run_concrete(p, {v}).coverage);
  CHECK(all.functions.size() == 8);
}

TEST_CASE("runs are deterministic and lowered runs agree") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto p = testing::random_program(seed);
    auto lp = lower(p);
    InputVector in{static_cast<std::int32_t>(seed % 7) - 3, 5, -2};
    auto a = run_concrete(p, in);
    auto b = run_concrete(lp, in);
    CHECK(a.coverage.functions == b.coverage.functions);
    CHECK(a.coverage.edge_bits == b.coverage.edge_bits);
    CHECK(a.printed == b.printed);
    CHECK(a.outcome == b.outcome);
    CHECK(a.steps == b.steps);
    CHECK(a.coverage.functions.count("main"));
  }
}

TEST_CASE("a prefix run covers no more than the full run") {
  auto p = parse_program("program p\nfunc main()\nblock a:\n  i = const 0\n  jmp b\n"
                         "block b:\n  i = add i 1\n  br lt i 50 -> b, c\nblock c:\n"
                         "  call f()\n  ret\nfunc f()\nblock a:\n  ret\n");
  auto full = run_concrete(p, {});
  for (std::uint64_t limit : {1u, 5u, 40u, 120u}) {
    auto part = run_concrete(p, {}, limit);
    CHECK((part.coverage.edge_bits & ~full.coverage.edge_bits).none());
    for (const auto &f : part.coverage.functions)
      CHECK(full.coverage.functions.count(f));
  }
}
