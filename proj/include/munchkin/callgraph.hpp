//===-- callgraph.hpp - Static call graph, depths and sonar distances -----===//
#pragma once

#include "munchkin/ir.hpp"
#include "munchkin/lowered.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

namespace munchkin {

inline constexpr std::uint32_t kUnreachable = UINT32_MAX;

struct CallGraph {
  std::set<FunctionName> nodes;
  /// caller -> callees, deduplicated.
  std::map<FunctionName, std::set<FunctionName>> edges;
  std::map<FunctionName, std::set<FunctionName>> callers;
  /// Minimum number of call edges from main; kUnreachable if never called.
  std::map<FunctionName, std::uint32_t> depths;

  std::uint32_t depth(const FunctionName &fn) const;
  bool reachable(const FunctionName &fn) const {
    return depth(fn) != kUnreachable;
  }
  std::set<FunctionName> reachable_functions() const;
  std::uint32_t max_depth() const;
  /// depth -> number of reachable functions at that depth.
  std::map<std::uint32_t, std::size_t> depth_histogram() const;
};

CallGraph build_callgraph(const Program &program);

/// Graphviz digraph, nodes labelled with their depth.
std::string callgraph_to_dot(const CallGraph &cg);
/// "function\tdepth" lines in name order; unreachable functions print
/// "unreachable" as their depth.
std::string callgraph_depths_tsv(const CallGraph &cg);

inline constexpr std::uint32_t kInfiniteDistance = UINT32_MAX;

/// Block-level interprocedural graph: intra-function CFG edges, call-site
/// block -> callee entry, and callee return block -> call-site block.
struct InterproceduralGraph {
  /// Flat node id for (function, block).
  std::vector<std::uint32_t> first_node; // per function
  std::vector<std::vector<std::uint32_t>> succ;

  std::uint32_t node(FuncIndex fn, BlockIndex b) const {
    return first_node[fn] + b;
  }
  std::size_t size() const { return succ.size(); }
};

InterproceduralGraph build_interprocedural_graph(const LoweredProgram &program);

/// Shortest hop count from every block to the target's entry block.
struct DistanceField {
  FunctionName target;
  std::vector<std::uint32_t> first_node;
  std::vector<std::uint32_t> dist;

  std::uint32_t at(FuncIndex fn, BlockIndex b) const {
    return dist[first_node[fn] + b];
  }
};

/// Backward BFS from the target's entry. Throws std::out_of_range for an
/// unknown target.
DistanceField sonar_distances(const LoweredProgram &program,
                              const FunctionName &target);

/// Per-program memo of distance fields. Lookups take a shared lock; a miss
/// computes outside the lock and inserts under an exclusive one.
class DistanceCache {
public:
  explicit DistanceCache(const LoweredProgram &program) : program_(program) {}

  std::shared_ptr<const DistanceField> get(const FunctionName &target);
  std::size_t size() const;

private:
  const LoweredProgram &program_;
  mutable std::shared_mutex mutex_;
  std::map<FunctionName, std::shared_ptr<const DistanceField>> fields_;
};

struct FrontierEntry {
  FunctionName name;
  std::uint32_t depth = kUnreachable;
  /// Uncovered with at least one covered caller.
  bool frontier = false;

  friend bool operator==(const FrontierEntry &, const FrontierEntry &) = default;
};

/// Uncovered functions: frontier ones first, then the rest; each group by
/// ascending depth, ties by name.
std::vector<FrontierEntry> frontier_set(const CallGraph &cg,
                                        const std::set<FunctionName> &covered);

} // namespace munchkin
