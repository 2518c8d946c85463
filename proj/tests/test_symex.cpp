#include "munchkin/generator.hpp"
#include "munchkin/lowered.hpp"
#include "munchkin/symex.hpp"
#include "munchkin/text_format.hpp"
#include "support/random_program.hpp"

#include <doctest.h>

#include <ostream>

using namespace munchkin;

namespace {

SymexConfig baseline(std::uint64_t seed = 0) {
  SymexConfig c;
  c.rng_seed = seed;
  return c;
}

SymexConfig sonar(const FunctionName &target) {
  SymexConfig c;
  c.search = SearchStrategy::Sonar;
  c.target = target;
  return c;
}

void check_sound(const LoweredProgram &lp, const SymResult &r) {
  for (const auto &tc : r.test_cases) {
    auto replay = run_concrete(lp, tc.input);
    for (const auto &fn : tc.covering)
      CHECK(replay.coverage.functions.count(fn));
  }
}

SymState at(const LoweredProgram &lp, std::uint64_t id, FuncIndex fn, BlockIndex b,
            std::uint64_t charged = 0) {
  SymState s;
  s.id = id;
  s.queries_charged = charged;
  s.stack.push_back({fn, b, 0, std::vector<SymValue>(lp.functions[fn].num_slots), kNoSlot});
  return s;
}

} // namespace

TEST_CASE("baseline covers (2,1)") {
  auto lp = lower(generate_program({2, 1, 0}));
  auto r = symex_campaign(lp, baseline());
  CHECK(r.coverage.functions.size() == 4);
  check_sound(lp, r);
}

TEST_CASE("baseline covers (2,3) with one test per leaf input") {
  auto p = generate_program({2, 3, 0});
  auto lp = lower(p);
  auto r = symex_campaign(lp, baseline());
  CHECK(r.coverage.functions.size() == 16);
  std::set<std::int32_t> leaf_inputs;
  for (const auto &tc : r.test_cases)
    for (const auto &fn : tc.covering)
      if (fn.rfind("leaf_", 0) == 0) {
        REQUIRE(tc.input.size() == 1);
        CHECK(fn == "leaf_" + std::to_string(tc.input[0]));
        leaf_inputs.insert(tc.input[0]);
      }
  CHECK(leaf_inputs == std::set<std::int32_t>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(r.replay_mismatches == 0);
  check_sound(lp, r);
  CHECK(count_branches(p) < r.stats.queries);
}

TEST_CASE("sonar on an already-entered target stops at once") {
  auto lp = lower(generate_program({2, 3, 0}));
  auto r = symex_campaign(lp, sonar("main"));
  CHECK(r.target_reached);
  CHECK(r.stats.queries == 0);
  REQUIRE(r.test_cases.size() >= 1);
  CHECK(r.test_cases[0].covering.count("main"));
}

TEST_CASE("sonar reaches each leaf") {
  auto lp = lower(generate_program({3, 2, 0}));
  for (int v = 0; v < 9; ++v) {
    auto target = "leaf_" + std::to_string(v);
    auto r = symex_campaign(lp, sonar(target));
    CHECK(r.target_reached);
    CHECK(r.coverage.functions.count(target));
    REQUIRE_FALSE(r.test_cases.empty());
    CHECK(r.test_cases.back().input == InputVector{v});
    check_sound(lp, r);
  }
}

TEST_CASE("sonar spends no more than baseline before the target") {
  for (auto [b, d] : {std::pair{2u, 3u}, std::pair{3u, 2u}}) {
    auto p = generate_program({b, d, 0});
    auto lp = lower(p);
    for (const auto &[v, _] : ground_truth_coverage({b, d, 0})) {
      auto target = leaf_name({b, d, 0}, v);
      // Smallest query budget under which baseline covers the target.
      std::uint64_t needed = 0;
      for (std::uint64_t q = 1; q <= 1000; ++q) {
        auto cfg = baseline(1);
        cfg.limits.max_queries = q;
        if (symex_campaign(lp, cfg).coverage.functions.count(target)) {
          needed = q;
          break;
        }
      }
      REQUIRE(needed > 0);
      auto r = symex_campaign(lp, sonar(target));
      CHECK(r.target_reached);
      CHECK(r.stats.queries <= needed);
    }
  }
}

TEST_CASE("constant branches cost nothing") {
  auto lp = lower(parse_program("program p\nfunc main()\nblock a:\n  x = const 3\n"
                                "  br lt x 5 -> b, c\nblock b:\n  call f()\n  ret\n"
                                "block c:\n  ret\nfunc f()\nblock a:\n  ret\n"));
  auto r = symex_campaign(lp, baseline());
  CHECK(r.stats.queries == 0);
  CHECK(r.coverage.functions == std::set<FunctionName>{"main", "f"});
}

TEST_CASE("one query per successor at a symbolic branch") {
  auto lp = lower(parse_program("program p\nfunc main()\nblock a:\n  x = input\n"
                                "  br lt x 5 -> b, c\nblock b:\n  ret\nblock c:\n  ret\n"));
  auto r = symex_campaign(lp, baseline());
  CHECK(r.stats.queries == 2);
  CHECK(r.states_explored == 3);
}

TEST_CASE("infeasible successors are dropped") {
  auto lp = lower(parse_program("program p\nfunc main()\nblock a:\n  x = input\n"
                                "  br lt x 5 -> b, c\nblock b:\n  br gt x 10 -> d, c\n"
                                "block c:\n  ret\nblock d:\n  call f()\n  ret\n"
                                "func f()\nblock a:\n  ret\n"));
  auto r = symex_campaign(lp, baseline());
  CHECK(r.coverage.functions.count("f") == 0);
  CHECK(r.stats.unsat == 1);
}

TEST_CASE("symbolic divisor forks a fault") {
  auto lp = lower(parse_program("program p\nfunc main()\nblock a:\n  x = input\n"
                                "  y = div 10 x\n  call f()\n  ret\nfunc f()\nblock a:\n  ret\n"));
  auto r = symex_campaign(lp, baseline());
  bool fault = false;
  for (const auto &tc : r.test_cases)
    if (tc.input == InputVector{0})
      fault = run_concrete(lp, tc.input).outcome == Outcome::ArithmeticFault;
  CHECK(fault);
  CHECK(r.coverage.functions.count("f"));
  check_sound(lp, r);
}

TEST_CASE("opaque guards never produce unsound claims") {
  auto lp = lower(parse_program("program p\nfunc main()\nblock a:\n  x = input\n"
                                "  y = mul x x\n  br eq y 49 -> b, c\nblock b:\n"
                                "  call f()\n  ret\nblock c:\n  ret\nfunc f()\nblock a:\n  ret\n"));
  auto r = symex_campaign(lp, baseline());
  CHECK(r.stats.unknown >= 1);
  check_sound(lp, r);
}

TEST_CASE("limits and argument errors") {
  auto lp = lower(generate_program({3, 3, 0}));
  auto cfg = baseline();
  cfg.limits.max_queries = 7;
  auto r = symex_campaign(lp, cfg);
  CHECK(r.stats.queries <= 7);
  check_sound(lp, r);

  cfg = baseline();
  cfg.limits.max_states = 5;
  CHECK(symex_campaign(lp, cfg).states_explored <= 5);

  cfg.limits.max_states = 0;
  CHECK_THROWS_AS(symex_campaign(lp, cfg), std::invalid_argument);
  SymexConfig no_target;
  no_target.search = SearchStrategy::Sonar;
  CHECK_THROWS_AS(symex_campaign(lp, no_target), std::invalid_argument);
  CHECK_THROWS_AS(symex_campaign(lp, sonar("missing")), std::out_of_range);
}

TEST_CASE("shared solver counts only this campaign") {
  auto lp = lower(generate_program({2, 2, 0}));
  Solver solver;
  auto first = symex_campaign(lp, baseline(), &solver);
  auto second = symex_campaign(lp, baseline(), &solver);
  CHECK(first.stats.queries > 0);
  CHECK(second.stats.queries == 0);
  CHECK(second.stats.cache_hits > 0);
  CHECK(second.coverage.functions == first.coverage.functions);
}

TEST_CASE("state selection") {
  auto lp = lower(generate_program({2, 2, 0}));
  std::mt19937_64 rng(1);
  std::vector<SymState> one{at(lp, 0, lp.main, 0)};
  CHECK(select_next_state(one, SearchStrategy::Baseline, nullptr, rng) == 0);
  CHECK(select_next_state(one, SearchStrategy::Sonar, nullptr, rng) == 0);

  auto df = sonar_distances(lp, "leaf_3");
  // Find blocks at distance 3 and 7.
  std::optional<std::pair<FuncIndex, BlockIndex>> d3, d7;
  for (FuncIndex f = 0; f < lp.functions.size(); ++f)
    for (BlockIndex b = 0; b < lp.functions[f].blocks.size(); ++b) {
      if (df.at(f, b) == 3 && !d3)
        d3 = {f, b};
      if (df.at(f, b) == 7 && !d7)
        d7 = {f, b};
    }
  REQUIRE(d3);
  REQUIRE(d7);
  std::vector<SymState> two{at(lp, 0, d7->first, d7->second), at(lp, 1, d3->first, d3->second)};
  CHECK(select_next_state(two, SearchStrategy::Sonar, &df, rng) == 1);

  // Ties: fewer queries charged, then lower id.
  std::vector<SymState> tied{at(lp, 5, d3->first, d3->second, 4),
                             at(lp, 9, d3->first, d3->second, 2),
                             at(lp, 2, d3->first, d3->second, 2)};
  CHECK(select_next_state(tied, SearchStrategy::Sonar, &df, rng) == 2);

  std::vector<SymState> five;
  for (std::uint64_t i = 0; i < 5; ++i)
    five.push_back(at(lp, i, lp.main, 0));
  std::mt19937_64 r1(99), r2(99);
  for (int i = 0; i < 20; ++i)
    CHECK(select_next_state(five, SearchStrategy::Baseline, nullptr, r1) ==
          select_next_state(five, SearchStrategy::Baseline, nullptr, r2));
}

TEST_CASE("campaigns on random programs are sound and deterministic") {
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    auto lp = lower(testing::random_program(seed, 4, 5));
    auto cfg = baseline(seed);
    cfg.limits.max_queries = 400;
    cfg.limits.max_states = 400;
    auto a = symex_campaign(lp, cfg);
    auto b = symex_campaign(lp, cfg);
    check_sound(lp, a);
    CHECK(a.stats == b.stats);
    REQUIRE(a.test_cases.size() == b.test_cases.size());
    for (std::size_t i = 0; i < a.test_cases.size(); ++i)
      CHECK(a.test_cases[i].input == b.test_cases[i].input);
  }
}

TEST_CASE("search names") {
  CHECK(parse_search("sonar") == SearchStrategy::Sonar);
  CHECK(parse_search("baseline") == SearchStrategy::Baseline);
  CHECK_FALSE(parse_search("dfs").has_value());
}
