#include "munchkin/orchestrator.hpp"

#include "munchkin/callgraph.hpp"
#include "munchkin/lowered.hpp"

#include <atomic>
#include <mutex>
#include <chrono>
#include <set>
#include <stdexcept>
#include <thread>

namespace munchkin {

std::string_view to_string(HybridMode m) {
  return m == HybridMode::FS ? "fs" : "sf";
}

std::optional<HybridMode> parse_mode(std::string_view text) {
  if (text == "fs" || text == "FS")
    return HybridMode::FS;
  if (text == "sf" || text == "SF")
    return HybridMode::SF;
  return std::nullopt;
}

std::string_view to_string(Technique t) {
  switch (t) {
  case Technique::FuzzOnly: return "AFL-like";
  case Technique::SymexOnly: return "SymexOnly";
  case Technique::FS: return "FS";
  case Technique::SF: return "SF";
  }
  return "?";
}

std::optional<Technique> parse_technique(std::string_view text) {
  for (auto t : {Technique::FuzzOnly, Technique::SymexOnly, Technique::FS,
                 Technique::SF})
    if (to_string(t) == text)
      return t;
  return std::nullopt;
}

void check_config(const HybridConfig &cfg) {
  if (cfg.mode == HybridMode::FS && cfg.per_target_query_budget == 0)
    throw std::invalid_argument("FS mode requires a positive per-target query budget");
  if (cfg.symex_limits.max_states == 0 || cfg.symex_limits.max_queries == 0)
    throw std::invalid_argument("symex limits must be positive");
}

std::size_t CampaignReport::covered_reachable() const {
  std::size_t n = 0;
  for (const auto &row : per_depth)
    n += row.covered;
  return n;
}

double CampaignReport::coverage_percent() const {
  if (reachable_functions == 0)
    return 0;
  return 100.0 * static_cast<double>(covered_reachable()) /
         static_cast<double>(reachable_functions);
}

namespace {

using Clock = std::chrono::steady_clock;

/// Insertion-ordered set of test inputs.
class Suite {
public:
  void add(const InputVector &v) {
    if (seen_.insert(v).second)
      items_.push_back(v);
  }
  void add(const FuzzResult &fuzz) {
    for (const auto &e : fuzz.corpus)
      add(e.input);
    for (const auto &[_, input] : fuzz.function_witnesses)
      add(input);
  }
  void add(const SymResult &sym) {
    for (const auto &tc : sym.test_cases)
      add(tc.input);
  }
  std::vector<InputVector> take() { return std::move(items_); }

private:
  std::set<InputVector> seen_;
  std::vector<InputVector> items_;
};

struct Context {
  explicit Context(const Program &p)
      : program(p), lowered(lower(p)), callgraph(build_callgraph(p)) {}
  const Program &program;
  LoweredProgram lowered;
  CallGraph callgraph;
};

FuzzConfig fuzz_config(const HybridConfig &cfg) {
  FuzzConfig fc;
  fc.rng_seed = cfg.rng_seed;
  fc.budget = cfg.fuzz_budget;
  fc.step_limit = cfg.symex_limits.step_limit;
  fc.havoc_stacking = cfg.havoc_stacking;
  return fc;
}

SymexConfig baseline_symex(const HybridConfig &cfg) {
  SymexConfig sc;
  sc.search = SearchStrategy::Baseline;
  sc.limits = cfg.symex_limits;
  sc.max_inputs = cfg.max_inputs;
  sc.rng_seed = cfg.rng_seed;
  return sc;
}

SymexConfig sonar_symex(const HybridConfig &cfg, const FunctionName &target) {
  SymexConfig sc;
  sc.search = SearchStrategy::Sonar;
  sc.limits = cfg.symex_limits;
  sc.limits.max_queries = cfg.per_target_query_budget;
  sc.limits.wall_clock_seconds = cfg.per_target_seconds;
  sc.max_inputs = cfg.max_inputs;
  sc.rng_seed = cfg.rng_seed;
  sc.target = target;
  return sc;
}

CampaignReport finish(Technique technique, const Context &ctx,
                      CoverageMap coverage, Clock::time_point started) {
  CampaignReport r;
  r.technique = technique;
  r.program = ctx.program.name;
  r.per_depth = depth_table(coverage, ctx.callgraph);
  r.reachable_functions = ctx.callgraph.reachable_functions().size();
  r.unreachable_functions = ctx.callgraph.nodes.size() - r.reachable_functions;
  r.coverage = std::move(coverage);
  r.duration = std::chrono::duration<double>(Clock::now() - started).count();
  return r;
}

// Sequential FS phase two. The frontier is recomputed after every target;
// functions covered en route are skipped.
void target_sequentially(const Context &ctx, const HybridConfig &cfg,
                         CoverageMap &coverage, Suite &suite,
                         SolverStats &stats, std::vector<TargetAttempt> &log) {
  Solver solver;
  DistanceCache distances(ctx.lowered);
  std::set<FunctionName> attempted;
  while (true) {
    std::optional<FrontierEntry> next;
    for (auto &e : frontier_set(ctx.callgraph, coverage.functions))
      if (e.depth != kUnreachable && !attempted.count(e.name)) {
        next = std::move(e);
        break;
      }
    if (!next)
      break;
    attempted.insert(next->name);
    auto sym = symex_campaign(ctx.lowered, sonar_symex(cfg, next->name),
                              &solver, &distances);
    coverage.merge(sym.coverage);
    suite.add(sym);
    log.push_back({next->name, next->frontier,
                   sym.coverage.functions.count(next->name) != 0,
                   sym.stats.queries});
  }
  stats += solver.stats();
}

// Parallel FS phase two: every uncovered reachable function at launch is a
// target with a solver of its own.
void target_in_parallel(const Context &ctx, const HybridConfig &cfg,
                        CoverageMap &coverage, Suite &suite,
                        SolverStats &stats, std::vector<TargetAttempt> &log) {
  std::vector<FrontierEntry> targets;
  for (auto &e : frontier_set(ctx.callgraph, coverage.functions))
    if (e.depth != kUnreachable)
      targets.push_back(std::move(e));

  std::vector<SymResult> results(targets.size());
  DistanceCache distances(ctx.lowered);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < targets.size() && !failed; i = next++) {
      try {
        Solver solver;
        results[i] = symex_campaign(ctx.lowered, sonar_symex(cfg, targets[i].name),
                                    &solver, &distances);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        error = std::current_exception();
        failed = true;
      }
    }
  };
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, targets.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);

  for (std::size_t i = 0; i < targets.size(); ++i) {
    coverage.merge(results[i].coverage);
    suite.add(results[i]);
    stats += results[i].stats;
    log.push_back({targets[i].name, targets[i].frontier,
                   results[i].coverage.functions.count(targets[i].name) != 0,
                   results[i].stats.queries});
  }
}

} // namespace

CampaignReport run_fs(const Program &program, const HybridConfig &cfg) {
  if (cfg.mode != HybridMode::FS)
    throw std::invalid_argument("run_fs requires mode FS");
  check_config(cfg);
  const auto started = Clock::now();
  Context ctx(program);

  auto fuzz = fuzz_campaign(ctx.lowered, cfg.seeds, fuzz_config(cfg));
  Suite suite;
  suite.add(fuzz);
  CoverageMap coverage = fuzz.cumulative;
  SolverStats stats;
  std::vector<TargetAttempt> log;
  if (cfg.parallel)
    target_in_parallel(ctx, cfg, coverage, suite, stats, log);
  else
    target_sequentially(ctx, cfg, coverage, suite, stats, log);

  auto r = finish(Technique::FS, ctx, std::move(coverage), started);
  r.solver_stats = stats;
  r.executions = fuzz.executions;
  r.test_suite = suite.take();
  r.targets = std::move(log);
  return r;
}

CampaignReport run_sf(const Program &program, const HybridConfig &cfg) {
  if (cfg.mode != HybridMode::SF)
    throw std::invalid_argument("run_sf requires mode SF");
  check_config(cfg);
  const auto started = Clock::now();
  Context ctx(program);

  auto sym = symex_campaign(ctx.lowered, baseline_symex(cfg));
  std::vector<InputVector> seeds;
  for (const auto &tc : sym.test_cases)
    seeds.push_back(tc.input);
  auto fuzz = fuzz_campaign(ctx.lowered, std::move(seeds), fuzz_config(cfg));

  Suite suite;
  suite.add(sym);
  suite.add(fuzz);
  auto r = finish(Technique::SF, ctx, merge_coverage(sym.coverage, fuzz.cumulative),
                  started);
  r.solver_stats = sym.stats;
  r.executions = fuzz.executions;
  r.test_suite = suite.take();
  return r;
}

CampaignReport run_hybrid(const Program &program, const HybridConfig &cfg) {
  return cfg.mode == HybridMode::FS ? run_fs(program, cfg) : run_sf(program, cfg);
}

CampaignReport run_fuzz_only(const Program &program, const HybridConfig &cfg) {
  const auto started = Clock::now();
  Context ctx(program);
  auto fuzz = fuzz_campaign(ctx.lowered, cfg.seeds, fuzz_config(cfg));
  Suite suite;
  suite.add(fuzz);
  auto r = finish(Technique::FuzzOnly, ctx, fuzz.cumulative, started);
  r.executions = fuzz.executions;
  r.test_suite = suite.take();
  return r;
}

CampaignReport run_symex_only(const Program &program, const HybridConfig &cfg) {
  const auto started = Clock::now();
  Context ctx(program);
  auto sym = symex_campaign(ctx.lowered, baseline_symex(cfg));
  Suite suite;
  suite.add(sym);
  auto r = finish(Technique::SymexOnly, ctx, sym.coverage, started);
  r.solver_stats = sym.stats;
  r.test_suite = suite.take();
  return r;
}

std::pair<CampaignReport, CampaignReport> run_baselines(const Program &program,
                                                        const HybridConfig &cfg) {
  return {run_fuzz_only(program, cfg), run_symex_only(program, cfg)};
}

nlohmann::json report_to_json(const CampaignReport &r, bool include_duration) {
  using nlohmann::json;
  json j;
  j["technique"] = std::string(to_string(r.technique));
  j["program"] = r.program;
  j["coverage"] = {{"covered", r.covered_reachable()},
                   {"reachable", r.reachable_functions},
                   {"unreachable", r.unreachable_functions},
                   {"percent", r.coverage_percent()},
                   {"edges", r.coverage.edge_count()}};
  j["covered_functions"] = r.coverage.functions;
  json rows = json::array();
  for (const auto &row : r.per_depth)
    rows.push_back({{"depth", row.depth},
                    {"covered", row.covered},
                    {"total", row.total},
                    {"percent", row.percent}});
  j["per_depth"] = std::move(rows);
  j["solver"] = {{"queries", r.solver_stats.queries},
                 {"sat", r.solver_stats.sat},
                 {"unsat", r.solver_stats.unsat},
                 {"unknown", r.solver_stats.unknown},
                 {"cache_hits", r.solver_stats.cache_hits}};
  j["executions"] = r.executions;
  j["test_suite"] = r.test_suite;
  json targets = json::array();
  for (const auto &t : r.targets)
    targets.push_back({{"function", t.function},
                       {"frontier", t.frontier},
                       {"reached", t.reached},
                       {"queries", t.queries}});
  j["targets"] = std::move(targets);
  if (include_duration)
    j["duration_seconds"] = r.duration;
  return j;
}

CampaignReport report_from_json(const nlohmann::json &j) {
  CampaignReport r;
  auto tech = parse_technique(j.at("technique").get<std::string>());
  if (!tech)
    throw std::runtime_error("unknown technique in report");
  r.technique = *tech;
  r.program = j.at("program").get<std::string>();
  r.coverage.functions = j.at("covered_functions").get<std::set<FunctionName>>();
  r.reachable_functions = j.at("coverage").at("reachable").get<std::size_t>();
  r.unreachable_functions = j.at("coverage").at("unreachable").get<std::size_t>();
  for (const auto &row : j.at("per_depth"))
    r.per_depth.push_back({row.at("depth").get<std::uint32_t>(),
                           row.at("covered").get<std::size_t>(),
                           row.at("total").get<std::size_t>(),
                           row.at("percent").get<std::uint32_t>()});
  const auto &s = j.at("solver");
  r.solver_stats = {s.at("queries").get<std::uint64_t>(),
                    s.at("sat").get<std::uint64_t>(),
                    s.at("unsat").get<std::uint64_t>(),
                    s.at("unknown").get<std::uint64_t>(),
                    s.at("cache_hits").get<std::uint64_t>()};
  r.executions = j.at("executions").get<std::uint64_t>();
  r.test_suite = j.at("test_suite").get<std::vector<InputVector>>();
  for (const auto &t : j.value("targets", nlohmann::json::array()))
    r.targets.push_back({t.at("function").get<std::string>(),
                         t.at("frontier").get<bool>(), t.at("reached").get<bool>(),
                         t.at("queries").get<std::uint64_t>()});
  r.duration = j.value("duration_seconds", 0.0);
  return r;
}

} // namespace munchkin
