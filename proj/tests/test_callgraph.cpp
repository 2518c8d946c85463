#include "munchkin/callgraph.hpp"
#include "munchkin/generator.hpp"
#include "munchkin/lowered.hpp"
#include "munchkin/text_format.hpp"
#include "support/random_program.hpp"

#include <doctest.h>

#include <ostream>

#include <algorithm>
#include <functional>

using namespace munchkin;

namespace {

const char *kChain = R"(program chain
func main()
block entry:
  x = input
  br lt x 0 -> go, stop
block go:
  call f(x)
  ret
block stop:
  ret

func f(x)
block entry:
  jmp mid
block mid:
  call g()
  ret

func g()
block entry:
  ret

func orphan()
block entry:
  ret
)";

} // namespace

TEST_CASE("chain depths") {
  auto cg = build_callgraph(parse_program(kChain));
  CHECK(cg.depth("main") == 0);
  CHECK(cg.depth("f") == 1);
  CHECK(cg.depth("g") == 2);
  CHECK(cg.depth("orphan") == kUnreachable);
  CHECK_FALSE(cg.reachable("orphan"));
  CHECK(cg.reachable_functions().size() == 3);
}

TEST_CASE("generated (2,3) depth histogram") {
  auto cg = build_callgraph(generate_program({2, 3, 0}));
  std::map<std::uint32_t, std::size_t> expect{{0, 1}, {1, 1}, {2, 2}, {3, 4}, {4, 8}};
  CHECK(cg.depth_histogram() == expect);
  std::size_t sum = 0;
  for (auto [_, n] : cg.depth_histogram())
    sum += n;
  CHECK(sum == 16);
}

TEST_CASE("depth is one more than the shallowest caller") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto p = testing::random_program(seed, 7, 4);
    auto cg = build_callgraph(p);
    CHECK(cg.depth("main") == 0);
    for (const auto &fn : cg.nodes) {
      if (fn == "main" || !cg.reachable(fn))
        continue;
      std::uint32_t best = kUnreachable;
      for (const auto &c : cg.callers.at(fn))
        best = std::min(best, cg.depth(c));
      CHECK(cg.depth(fn) == best + 1);
    }
  }
}

TEST_CASE("sonar distances on the chain match exhaustive path search") {
  auto p = parse_program(kChain);
  auto lp = lower(p);

  // Explicit block graph written out by hand.
  using Node = std::pair<std::string, std::string>;
  std::map<Node, std::vector<Node>> edges{
      {{"main", "entry"}, {{"main", "go"}, {"main", "stop"}}},
      {{"main", "go"}, {{"f", "entry"}}},
      {{"f", "entry"}, {{"f", "mid"}}},
      {{"f", "mid"}, {{"g", "entry"}}},
      {{"g", "entry"}, {{"f", "mid"}}},
      {{"f", "mid"}, {{"g", "entry"}}},
  };
  edges[{"f", "mid"}].push_back({"main", "go"});
  Node goal{"g", "entry"};
  std::function<std::uint32_t(Node, std::set<Node> &)> shortest =
      [&](Node n, std::set<Node> &seen) -> std::uint32_t {
    if (n == goal)
      return 0;
    std::uint32_t best = kInfiniteDistance;
    seen.insert(n);
    for (const auto &m : edges[n])
      if (!seen.count(m)) {
        auto d = shortest(m, seen);
        if (d != kInfiniteDistance)
          best = std::min(best, d + 1);
      }
    seen.erase(n);
    return best;
  };

  auto df = sonar_distances(lp, "g");
  for (const auto &[fname, fn] : p.functions)
    for (const auto &[bid, _] : fn.blocks) {
      auto fi = lp.function_index(fname);
      auto bi = lp.functions[fi].block_index(bid);
      std::set<Node> seen;
      CHECK_MESSAGE(df.at(fi, bi) == shortest({fname, bid}, seen), fname << "." << bid);
    }
  CHECK(df.at(lp.main, lp.functions[lp.main].entry) == 4);
  CHECK(df.at(lp.function_index("g"), 0) == 0);
}

TEST_CASE("unreachable target and unknown target") {
  auto lp = lower(parse_program(kChain));
  auto df = sonar_distances(lp, "orphan");
  CHECK(df.at(lp.main, lp.functions[lp.main].entry) == kInfiniteDistance);
  CHECK(df.at(lp.function_index("orphan"), 0) == 0);
  CHECK_THROWS_AS(sonar_distances(lp, "nope"), std::out_of_range);
}

TEST_CASE("distance field is a relaxation fixed point") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto lp = lower(testing::random_program(seed, 6, 5));
    auto g = build_interprocedural_graph(lp);
    for (const auto &fn : lp.functions) {
      auto df = sonar_distances(lp, fn.name);
      for (std::uint32_t u = 0; u < g.size(); ++u) {
        if (df.dist[u] == 0)
          continue;
        std::uint32_t best = kInfiniteDistance;
        for (auto v : g.succ[u])
          if (df.dist[v] != kInfiniteDistance)
            best = std::min(best, df.dist[v] + 1);
        CHECK(df.dist[u] == best);
      }
    }
  }
}

TEST_CASE("distance cache returns one field per target") {
  auto lp = lower(generate_program({2, 2, 0}));
  DistanceCache cache(lp);
  auto a = cache.get("leaf_3");
  auto b = cache.get("leaf_3");
  CHECK(a.get() == b.get());
  cache.get("leaf_0");
  CHECK(cache.size() == 2);
}

TEST_CASE("frontier ordering") {
  auto chain = build_callgraph(parse_program(kChain));
  CHECK(frontier_set(chain, chain.nodes).empty());

  auto fr = frontier_set(chain, {"main"});
  REQUIRE(fr.size() == 3);
  CHECK(fr[0] == FrontierEntry{"f", 1, true});
  CHECK(fr[1] == FrontierEntry{"g", 2, false});
  CHECK(fr[2].name == "orphan");

  auto cg = build_callgraph(generate_program({2, 2, 0}));
  auto tree = frontier_set(cg, {"main", "node_0_3", "node_0_1", "leaf_0", "leaf_1"});
  REQUIRE(tree.size() == 3);
  CHECK(tree[0] == FrontierEntry{"node_2_3", 2, true});
  CHECK(tree[1].depth == 3);
  CHECK_FALSE(tree[1].frontier);

  // A permutation of the uncovered set.
  std::set<FunctionName> covered{"main", "node_0_3"};
  std::set<FunctionName> listed;
  for (const auto &e : frontier_set(cg, covered))
    listed.insert(e.name);
  std::set<FunctionName> uncovered;
  std::set_difference(cg.nodes.begin(), cg.nodes.end(), covered.begin(), covered.end(),
                      std::inserter(uncovered, uncovered.end()));
  CHECK(listed == uncovered);
}

TEST_CASE("dot and depth listings") {
  auto cg = build_callgraph(parse_program(kChain));
  auto dot = callgraph_to_dot(cg);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("\"main\" -> \"f\"") != std::string::npos);
  auto tsv = callgraph_depths_tsv(cg);
  CHECK(tsv.find("g\t2\n") != std::string::npos);
  CHECK(tsv.find("orphan\tunreachable\n") != std::string::npos);
}
