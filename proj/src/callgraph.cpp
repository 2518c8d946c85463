#include "munchkin/callgraph.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <sstream>

namespace munchkin {

std::uint32_t CallGraph::depth(const FunctionName &fn) const {
  auto it = depths.find(fn);
  return it == depths.end() ? kUnreachable : it->second;
}

std::set<FunctionName> CallGraph::reachable_functions() const {
  std::set<FunctionName> out;
  for (const auto &[fn, d] : depths)
    if (d != kUnreachable)
      out.insert(fn);
  return out;
}

std::uint32_t CallGraph::max_depth() const {
  std::uint32_t m = 0;
  for (const auto &[_, d] : depths)
    if (d != kUnreachable)
      m = std::max(m, d);
  return m;
}

std::map<std::uint32_t, std::size_t> CallGraph::depth_histogram() const {
  std::map<std::uint32_t, std::size_t> h;
  for (const auto &[_, d] : depths)
    if (d != kUnreachable)
      ++h[d];
  return h;
}

CallGraph build_callgraph(const Program &program) {
  CallGraph cg;
  for (const auto &[name, fn] : program.functions) {
    cg.nodes.insert(name);
    cg.edges[name];
    cg.callers[name];
    cg.depths[name] = kUnreachable;
  }
  for (const auto &[name, fn] : program.functions)
    for (const auto &[_, block] : fn.blocks)
      for (const auto &inst : block.instructions)
        if (auto *call = std::get_if<CallInst>(&inst)) {
          cg.edges[name].insert(call->callee);
          cg.callers[call->callee].insert(name);
        }

  if (!cg.nodes.count(program.entry))
    return cg;
  std::deque<FunctionName> work{program.entry};
  cg.depths[program.entry] = 0;
  while (!work.empty()) {
    auto fn = work.front();
    work.pop_front();
    auto d = cg.depths[fn];
    for (const auto &callee : cg.edges[fn]) {
      auto &cd = cg.depths[callee];
      if (cd == kUnreachable) {
        cd = d + 1;
        work.push_back(callee);
      }
    }
  }
  return cg;
}

std::string callgraph_to_dot(const CallGraph &cg) {
  std::ostringstream os;
  os << "digraph callgraph {\n";
  for (const auto &fn : cg.nodes) {
    auto d = cg.depth(fn);
    os << "  \"" << fn << "\" [label=\"" << fn << "\\ndepth "
       << (d == kUnreachable ? std::string("unreachable") : std::to_string(d))
       << "\"];\n";
  }
  for (const auto &[caller, callees] : cg.edges)
    for (const auto &callee : callees)
      os << "  \"" << caller << "\" -> \"" << callee << "\";\n";
  os << "}\n";
  return os.str();
}

std::string callgraph_depths_tsv(const CallGraph &cg) {
  std::ostringstream os;
  for (const auto &fn : cg.nodes) {
    auto d = cg.depth(fn);
    os << fn << '\t'
       << (d == kUnreachable ? std::string("unreachable") : std::to_string(d))
       << '\n';
  }
  return os.str();
}

InterproceduralGraph build_interprocedural_graph(const LoweredProgram &program) {
  InterproceduralGraph g;
  std::uint32_t total = 0;
  for (const auto &fn : program.functions) {
    g.first_node.push_back(total);
    total += static_cast<std::uint32_t>(fn.blocks.size());
  }
  g.succ.resize(total);

  // call sites per callee, for return edges
  std::vector<std::vector<std::uint32_t>> call_sites(program.functions.size());
  for (FuncIndex f = 0; f < program.functions.size(); ++f) {
    const auto &fn = program.functions[f];
    for (BlockIndex b = 0; b < fn.blocks.size(); ++b) {
      const auto &blk = fn.blocks[b];
      auto u = g.node(f, b);
      for (const auto &inst : blk.insts)
        if (inst.kind == LInst::Kind::Call) {
          g.succ[u].push_back(
              g.node(inst.callee, program.functions[inst.callee].entry));
          call_sites[inst.callee].push_back(u);
        }
      if (blk.term.kind == LTerm::Kind::Branch) {
        g.succ[u].push_back(g.node(f, blk.term.then_block));
        g.succ[u].push_back(g.node(f, blk.term.else_block));
      } else if (blk.term.kind == LTerm::Kind::Jump) {
        g.succ[u].push_back(g.node(f, blk.term.then_block));
      }
    }
  }
  for (FuncIndex f = 0; f < program.functions.size(); ++f) {
    const auto &fn = program.functions[f];
    for (BlockIndex b = 0; b < fn.blocks.size(); ++b)
      if (fn.blocks[b].term.kind == LTerm::Kind::Return)
        for (auto site : call_sites[f])
          g.succ[g.node(f, b)].push_back(site);
  }
  for (auto &s : g.succ) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return g;
}

DistanceField sonar_distances(const LoweredProgram &program,
                              const FunctionName &target) {
  const FuncIndex t = program.function_index(target);
  auto g = build_interprocedural_graph(program);

  std::vector<std::vector<std::uint32_t>> pred(g.size());
  for (std::uint32_t u = 0; u < g.size(); ++u)
    for (auto v : g.succ[u])
      pred[v].push_back(u);

  DistanceField df;
  df.target = target;
  df.first_node = g.first_node;
  df.dist.assign(g.size(), kInfiniteDistance);
  auto start = g.node(t, program.functions[t].entry);
  df.dist[start] = 0;
  std::deque<std::uint32_t> work{start};
  while (!work.empty()) {
    auto v = work.front();
    work.pop_front();
    for (auto u : pred[v])
      if (df.dist[u] == kInfiniteDistance) {
        df.dist[u] = df.dist[v] + 1;
        work.push_back(u);
      }
  }
  return df;
}

std::shared_ptr<const DistanceField>
DistanceCache::get(const FunctionName &target) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = fields_.find(target); it != fields_.end())
      return it->second;
  }
  auto field = std::make_shared<const DistanceField>(
      sonar_distances(program_, target));
  std::unique_lock lock(mutex_);
  return fields_.emplace(target, std::move(field)).first->second;
}

std::size_t DistanceCache::size() const {
  std::shared_lock lock(mutex_);
  return fields_.size();
}

std::vector<FrontierEntry> frontier_set(const CallGraph &cg,
                                        const std::set<FunctionName> &covered) {
  std::vector<FrontierEntry> out;
  for (const auto &fn : cg.nodes) {
    if (covered.count(fn))
      continue;
    FrontierEntry e{fn, cg.depth(fn), false};
    if (auto it = cg.callers.find(fn); it != cg.callers.end())
      e.frontier = std::any_of(it->second.begin(), it->second.end(),
                               [&](const auto &c) { return covered.count(c) != 0; });
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    if (a.frontier != b.frontier)
      return a.frontier;
    if (a.depth != b.depth)
      return a.depth < b.depth;
    return a.name < b.name;
  });
  return out;
}

} // namespace munchkin
