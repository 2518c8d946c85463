//===-- orchestrator.hpp - FS / SF hybrid campaigns and baselines ---------===//
//
// FS: fuzz, then for every function the fuzzer missed (frontier functions
//     first, shallow before deep) run a sonar-directed symbolic search with a
//     per-target query budget, re-merging coverage after each target.
// SF: baseline symbolic execution, then fuzz from its test cases.
//
//===----------------------------------------------------------------------===//
#pragma once

#include "munchkin/fuzzer.hpp"
#include "munchkin/ir.hpp"
#include "munchkin/report.hpp"
#include "munchkin/solver.hpp"
#include "munchkin/symex.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace munchkin {

enum class HybridMode { FS, SF };
std::string_view to_string(HybridMode m);
std::optional<HybridMode> parse_mode(std::string_view text);

enum class Technique { FuzzOnly, SymexOnly, FS, SF };
/// "AFL-like", "SymexOnly", "FS", "SF".
std::string_view to_string(Technique t);
std::optional<Technique> parse_technique(std::string_view text);

struct HybridConfig {
  HybridMode mode = HybridMode::FS;
  std::uint64_t fuzz_budget = 1000;
  SymexLimits symex_limits;
  /// FS only: queries each sonar run may issue.
  std::uint64_t per_target_query_budget = 2000;
  /// FS only: optional wall-clock cap per target.
  std::optional<double> per_target_seconds;
  std::vector<InputVector> seeds;
  std::uint64_t rng_seed = 0;
  std::uint32_t max_inputs = 4;
  std::uint32_t havoc_stacking = 4;
  /// FS only: run the targets concurrently from a coverage snapshot.
  bool parallel = false;
  unsigned threads = 0;
};

/// Throws std::invalid_argument when an invariant of the config is broken.
void check_config(const HybridConfig &cfg);

struct TargetAttempt {
  FunctionName function;
  bool frontier = false;
  bool reached = false;
  std::uint64_t queries = 0;
};

struct CampaignReport {
  Technique technique = Technique::FS;
  std::string program;
  CoverageMap coverage;
  std::vector<DepthRow> per_depth;
  std::size_t reachable_functions = 0;
  std::size_t unreachable_functions = 0;
  SolverStats solver_stats;
  std::uint64_t executions = 0;
  std::vector<InputVector> test_suite;
  /// FS only, in the order attempted.
  std::vector<TargetAttempt> targets;
  double duration = 0;

  std::size_t covered_reachable() const;
  /// 100 * covered reachable / reachable.
  double coverage_percent() const;
};

CampaignReport run_fs(const Program &program, const HybridConfig &cfg);
CampaignReport run_sf(const Program &program, const HybridConfig &cfg);
/// Dispatches on cfg.mode.
CampaignReport run_hybrid(const Program &program, const HybridConfig &cfg);

/// Fuzz-only with cfg.fuzz_budget and cfg.seeds (the same run FS starts
/// with), and baseline symex alone within cfg.symex_limits.
std::pair<CampaignReport, CampaignReport> run_baselines(const Program &program,
                                                        const HybridConfig &cfg);
CampaignReport run_fuzz_only(const Program &program, const HybridConfig &cfg);
CampaignReport run_symex_only(const Program &program, const HybridConfig &cfg);

/// Schema:
/// { "technique", "program", "coverage": {"covered", "reachable",
///   "unreachable", "percent", "edges"}, "covered_functions": [..],
///   "per_depth": [{"depth","covered","total","percent"}],
///   "solver": {"queries","sat","unsat","unknown","cache_hits"},
///   "executions", "test_suite": [[int..]..],
///   "targets": [{"function","frontier","reached","queries"}],
///   "duration_seconds" }
nlohmann::json report_to_json(const CampaignReport &report,
                              bool include_duration = true);
/// Inverse of report_to_json, except for edge bits (not serialized).
CampaignReport report_from_json(const nlohmann::json &j);

} // namespace munchkin
