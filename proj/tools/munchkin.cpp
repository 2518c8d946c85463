// munchkin - generate, fuzz, symbolically execute and compare coverage of
// .mir programs.
#include "munchkin/callgraph.hpp"
#include "munchkin/fuzzer.hpp"
#include "munchkin/generator.hpp"
#include "munchkin/lowered.hpp"
#include "munchkin/orchestrator.hpp"
#include "munchkin/report.hpp"
#include "munchkin/symex.hpp"
#include "munchkin/table1.hpp"
#include "munchkin/text_format.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using namespace munchkin;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kCampaignFailure = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path output_root() {
  if (const char *env = std::getenv("MUNCHKIN_OUT"); env && *env)
    return env;
  return "munchkin-out";
}

fs::path out_dir(const std::string &flag, const std::string &subcommand) {
  fs::path dir = flag.empty() ? output_root() / subcommand : fs::path(flag);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One decimal int32 per line; blank lines and '#' comments are skipped.
InputVector parse_test_case(const std::string &text, const std::string &origin) {
  InputVector v;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos)
      line.resize(hash);
    std::istringstream ls(line);
    long long value;
    if (!(ls >> value)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error(origin + ": not an integer: " + line);
      continue;
    }
    if (value < INT32_MIN || value > INT32_MAX)
      throw std::runtime_error(origin + ": out of int32 range: " + line);
    v.push_back(static_cast<std::int32_t>(value));
  }
  return v;
}

std::string format_test_case(const InputVector &v) {
  std::string out;
  for (auto x : v)
    out += std::to_string(x) + "\n";
  return out;
}

std::vector<InputVector> read_seed_dir(const std::string &dir) {
  std::vector<InputVector> seeds;
  if (dir.empty())
    return seeds;
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file())
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto &f : files)
    seeds.push_back(parse_test_case(read_file(f), f.string()));
  return seeds;
}

void write_tests(const fs::path &dir, const std::vector<InputVector> &tests) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < tests.size(); ++i) {
    std::ostringstream name;
    name << "test-" << std::setw(6) << std::setfill('0') << i << ".txt";
    write_file(dir / name.str(), format_test_case(tests[i]));
  }
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

json coverage_json(const CoverageMap &c) {
  return {{"functions", c.functions}, {"edges", c.edge_count()}};
}

json stats_json(const SolverStats &s) {
  return {{"queries", s.queries},
          {"sat", s.sat},
          {"unsat", s.unsat},
          {"unknown", s.unknown},
          {"cache_hits", s.cache_hits}};
}

std::optional<double> seconds(double v) {
  return v > 0 ? std::optional<double>(v) : std::nullopt;
}

// Options shared by the campaign subcommands.
struct CampaignOptions {
  std::string program;
  std::string out;
  std::string seeds;
  std::uint64_t rng_seed = 0;
  std::uint64_t fuzz_budget = 1000;
  std::uint64_t symex_queries = 100'000;
  std::uint64_t symex_states = 100'000;
  std::uint64_t per_target_queries = 2000;
  double per_target_seconds = 0;
  std::uint64_t step_limit = kDefaultStepLimit;
  std::uint32_t max_inputs = 4;
  std::uint32_t havoc = 4;
  std::string mode = "fs";
  bool parallel = false;
  unsigned threads = 0;

  HybridConfig config() const {
    HybridConfig cfg;
    auto m = parse_mode(mode);
    if (!m)
      throw UsageError("--mode must be fs or sf");
    cfg.mode = *m;
    cfg.fuzz_budget = fuzz_budget;
    cfg.symex_limits.max_queries = symex_queries;
    cfg.symex_limits.max_states = symex_states;
    cfg.symex_limits.step_limit = step_limit;
    cfg.per_target_query_budget = per_target_queries;
    cfg.per_target_seconds = seconds(per_target_seconds);
    cfg.seeds = read_seed_dir(seeds);
    cfg.rng_seed = rng_seed;
    cfg.max_inputs = max_inputs;
    cfg.havoc_stacking = havoc;
    cfg.parallel = parallel;
    cfg.threads = threads;
    return cfg;
  }
};

void add_common(CLI::App *cmd, CampaignOptions &o, bool with_program = true) {
  if (with_program)
    cmd->add_option("program", o.program, "Program file (.mir)")
        ->required()
        ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory (default $MUNCHKIN_OUT/<command>)");
  cmd->add_option("--rng-seed", o.rng_seed, "Seed for all randomized choices");
  cmd->add_option("--step-limit", o.step_limit, "Instructions per execution");
}

void save_report(const fs::path &dir, const std::string &stem,
                 const CampaignReport &r) {
  write_file(dir / (stem + ".json"), dump(report_to_json(r)));
  write_file(dir / (stem + "-depth.tsv"), depth_table_tsv(r.per_depth));
}

int cmd_generate(std::uint32_t b, std::uint32_t d, std::uint64_t seed,
                 const std::string &out) {
  GenParams params{b, d, seed};
  try {
    check_params(params);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  auto program = generate_program(params);
  fs::path path = out.empty() ? output_root() / (program.name + ".mir") : fs::path(out);
  if (path.has_parent_path())
    fs::create_directories(path.parent_path());
  save_program(program, path.string());
  std::cout << path.string() << ": " << program.functions.size() << " functions\n";
  return 0;
}

int cmd_callgraph(const std::string &file, bool dot, bool depths) {
  auto cg = build_callgraph(load_program(file));
  if (dot == depths)
    throw UsageError("callgraph needs exactly one of --dot, --depths");
  std::cout << (dot ? callgraph_to_dot(cg) : callgraph_depths_tsv(cg));
  return 0;
}

int cmd_fuzz(const CampaignOptions &o, double wall) {
  auto program = load_program(o.program);
  auto lowered = lower(program);
  FuzzConfig fc;
  fc.rng_seed = o.rng_seed;
  fc.budget = o.fuzz_budget;
  fc.step_limit = o.step_limit;
  fc.havoc_stacking = o.havoc;
  fc.wall_clock_seconds = seconds(wall);
  auto result = fuzz_campaign(lowered, read_seed_dir(o.seeds), fc);

  auto dir = out_dir(o.out, "fuzz");
  fs::create_directories(dir / "corpus");
  std::size_t seed_index = 0;
  for (const auto &e : result.corpus) {
    std::string name = e.discovery_iteration == 0
                           ? "seed-" + std::to_string(seed_index++)
                           : "id-" + std::to_string(e.discovery_iteration);
    write_file(dir / "corpus" / (name + ".txt"), format_test_case(e.input));
  }
  fs::create_directories(dir / "faults");
  json faults = json::array();
  for (std::size_t i = 0; i < result.faults.size(); ++i) {
    const auto &f = result.faults[i];
    write_file(dir / "faults" / ("fault-" + std::to_string(i) + ".txt"),
               format_test_case(f.input));
    faults.push_back({{"input", f.input}, {"outcome", std::string(to_string(f.outcome))}});
  }
  json summary{{"program", program.name},
               {"executions", result.executions},
               {"corpus_size", result.corpus.size()},
               {"coverage", coverage_json(result.cumulative)},
               {"faults", faults}};
  write_file(dir / "summary.json", dump(summary));
  std::cout << "executions " << result.executions << ", corpus "
            << result.corpus.size() << ", functions "
            << result.cumulative.functions.size() << "/" << program.functions.size()
            << "\n";
  return 0;
}

int cmd_symex(const CampaignOptions &o, const std::string &search,
              const std::string &target, double wall) {
  auto program = load_program(o.program);
  auto lowered = lower(program);
  SymexConfig sc;
  auto strategy = parse_search(search);
  if (!strategy)
    throw UsageError("--search must be baseline or sonar");
  sc.search = *strategy;
  if (!target.empty())
    sc.target = target;
  if (sc.search == SearchStrategy::Sonar && !sc.target)
    throw UsageError("--search sonar requires --target");
  if (sc.target && !program.functions.count(*sc.target))
    throw UsageError("unknown target function '" + *sc.target + "'");
  if (o.symex_queries == 0 || o.symex_states == 0)
    throw UsageError("--max-queries and --max-states must be positive");
  sc.limits.max_queries = o.symex_queries;
  sc.limits.max_states = o.symex_states;
  sc.limits.step_limit = o.step_limit;
  sc.limits.wall_clock_seconds = seconds(wall);
  sc.max_inputs = o.max_inputs;
  sc.rng_seed = o.rng_seed;
  auto result = symex_campaign(lowered, sc);

  auto dir = out_dir(o.out, "symex");
  std::vector<InputVector> inputs;
  json cases = json::array();
  for (const auto &tc : result.test_cases) {
    inputs.push_back(tc.input);
    cases.push_back({{"input", tc.input}, {"covering", tc.covering}});
  }
  write_tests(dir / "tests", inputs);
  json summary{{"program", program.name},
               {"search", std::string(to_string(sc.search))},
               {"target_reached", result.target_reached},
               {"states_explored", result.states_explored},
               {"replay_mismatches", result.replay_mismatches},
               {"coverage", coverage_json(result.coverage)},
               {"solver", stats_json(result.stats)},
               {"test_cases", cases}};
  if (sc.target)
    summary["target"] = *sc.target;
  write_file(dir / "summary.json", dump(summary));
  std::cout << "tests " << result.test_cases.size() << ", functions "
            << result.coverage.functions.size() << "/" << program.functions.size()
            << ", queries " << result.stats.queries << "\n";
  return 0;
}

int cmd_hybrid(const CampaignOptions &o) {
  auto program = load_program(o.program);
  auto cfg = o.config();
  try {
    check_config(cfg);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  auto report = run_hybrid(program, cfg);
  auto dir = out_dir(o.out, "hybrid");
  save_report(dir, "report", report);
  write_tests(dir / "tests", report.test_suite);
  std::cout << to_string(report.technique) << ": " << report.covered_reachable()
            << "/" << report.reachable_functions << " functions, "
            << report.solver_stats.queries << " queries\n";
  return 0;
}

int cmd_baselines(const CampaignOptions &o) {
  auto program = load_program(o.program);
  auto [fuzz, symex] = run_baselines(program, o.config());
  auto dir = out_dir(o.out, "baselines");
  save_report(dir, "fuzz-only", fuzz);
  save_report(dir, "symex-only", symex);
  for (const auto *r : {&fuzz, &symex})
    std::cout << to_string(r->technique) << ": " << r->covered_reachable() << "/"
              << r->reachable_functions << " functions, "
              << r->solver_stats.queries << " queries\n";
  return 0;
}

// The four reports in plot-column order, keyed by their technique tag.
std::array<CampaignReport, 4> load_four(const std::vector<std::string> &files) {
  std::array<std::optional<CampaignReport>, 4> slots;
  for (const auto &f : files) {
    auto r = report_from_json(json::parse(read_file(f)));
    auto name = std::string(to_string(r.technique));
    auto it = std::find(kPlotColumns.begin(), kPlotColumns.end(), name);
    auto &slot = slots[static_cast<std::size_t>(it - kPlotColumns.begin())];
    if (slot)
      throw UsageError("two reports for technique " + name);
    slot = std::move(r);
  }
  std::array<CampaignReport, 4> out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!slots[i])
      throw UsageError("missing report for technique " + kPlotColumns[i]);
    out[i] = std::move(*slots[i]);
  }
  return out;
}

int cmd_report(const std::vector<std::string> &reports, const std::string &program_file,
               const std::vector<std::string> &average, const std::string &out) {
  auto dir = out_dir(out, "report");
  if (!average.empty()) {
    std::vector<PlotData> inputs;
    for (const auto &f : average)
      inputs.push_back(parse_plot_dat(read_file(f)));
    write_file(dir / "plot-avg.dat", format_plot_dat(average_plot_data(inputs)));
    std::cout << (dir / "plot-avg.dat").string() << "\n";
    return 0;
  }
  if (reports.size() != 4)
    throw UsageError("report needs four JSON reports or --average");
  auto four = load_four(reports);
  std::array<std::vector<DepthRow>, 4> tables;
  std::vector<std::string> names;
  std::vector<std::vector<DepthRow>> aligned;
  for (std::size_t i = 0; i < 4; ++i) {
    tables[i] = four[i].per_depth;
    names.push_back(kPlotColumns[i]);
    aligned.push_back(four[i].per_depth);
    write_file(dir / (kPlotColumns[i] + "-depth.tsv"), depth_table_tsv(four[i].per_depth));
  }
  const auto &prog = four[0].program;
  emit_plot_dat(tables, (dir / ("plot-" + prog + ".dat")).string());
  auto table = render_depth_comparison(align_depth_tables(names, aligned));
  write_file(dir / "depth-comparison.txt", table);
  std::cout << table;

  if (!program_file.empty()) {
    auto cg = build_callgraph(load_program(program_file));
    std::map<std::string, std::set<FunctionName>> named;
    for (std::size_t i = 0; i < 4; ++i)
      named[kPlotColumns[i]] = four[i].coverage.functions;
    json inter = json::array();
    for (const auto &[subset, pct] : intersection_report(named, cg))
      inter.push_back({{"techniques", subset}, {"percent", pct}});
    write_file(dir / "intersections.json", dump(inter));
  }
  return 0;
}

int cmd_table1(const CampaignOptions &o) {
  auto cfg = o.config();
  auto rows = run_table1(cfg);
  auto text = render_table1(rows);
  std::cout << text;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    write_file(fs::path(o.out) / "table1.txt", text);
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"munchkin: function-coverage campaigns on .mir programs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML key = value configuration file");
  app.option_defaults()->always_capture_default();

  // generate
  std::uint32_t branching = 2, depth = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto *gen = app.add_subcommand("generate", "Emit a branching range-dispatch program");
  gen->add_option("--branching,-b", branching, "Children per node")->required();
  gen->add_option("--depth,-d", depth, "Tree depth")->required();
  gen->add_option("--seed", gen_seed, "Name salt; 0 keeps plain names");
  gen->add_option("--out", gen_out, "Output .mir file");

  // callgraph
  std::string cg_file;
  bool cg_dot = false, cg_depths = false;
  auto *cg = app.add_subcommand("callgraph", "Print the call graph");
  cg->add_option("program", cg_file, "Program file (.mir)")->required()->check(CLI::ExistingFile);
  cg->add_flag("--dot", cg_dot, "Graphviz output");
  cg->add_flag("--depths", cg_depths, "function<TAB>depth lines");

  // fuzz
  CampaignOptions fuzz_opts;
  double fuzz_seconds = 0;
  auto *fuzz = app.add_subcommand("fuzz", "Coverage-guided fuzzing");
  add_common(fuzz, fuzz_opts);
  fuzz->add_option("--seeds", fuzz_opts.seeds, "Directory of seed test cases")->check(CLI::ExistingDirectory);
  fuzz->add_option("--budget", fuzz_opts.fuzz_budget, "Mutant executions");
  fuzz->add_option("--havoc", fuzz_opts.havoc, "Maximum stacked mutations");
  fuzz->add_option("--seconds", fuzz_seconds, "Optional wall-clock cap");

  // symex
  CampaignOptions sym_opts;
  std::string search = "baseline", target;
  double sym_seconds = 0;
  auto *sym = app.add_subcommand("symex", "Symbolic execution");
  add_common(sym, sym_opts);
  sym->add_option("--search", search, "baseline or sonar");
  sym->add_option("--target", target, "Target function for sonar");
  sym->add_option("--max-states", sym_opts.symex_states, "States explored");
  sym->add_option("--max-queries", sym_opts.symex_queries, "Solver queries issued");
  sym->add_option("--max-inputs", sym_opts.max_inputs, "Symbolic inputs per path");
  sym->add_option("--seconds", sym_seconds, "Optional wall-clock cap");

  // hybrid, baselines, table1 share the hybrid knobs
  CampaignOptions hyb_opts, base_opts, t1_opts;
  t1_opts.rng_seed = 7;
  auto add_hybrid = [](CLI::App *cmd, CampaignOptions &o) {
    cmd->add_option("--fuzz-budget", o.fuzz_budget, "Fuzzer executions");
    cmd->add_option("--symex-queries", o.symex_queries, "Query limit for baseline symex");
    cmd->add_option("--symex-states", o.symex_states, "State limit for symex");
    cmd->add_option("--per-target-queries", o.per_target_queries, "FS query budget per target");
    cmd->add_option("--per-target-seconds", o.per_target_seconds, "Optional FS wall-clock cap per target");
    cmd->add_option("--max-inputs", o.max_inputs, "Symbolic inputs per path");
    cmd->add_option("--havoc", o.havoc, "Maximum stacked mutations");
  };
  auto *hyb = app.add_subcommand("hybrid", "FS or SF hybrid campaign");
  add_common(hyb, hyb_opts);
  add_hybrid(hyb, hyb_opts);
  hyb->add_option("--mode", hyb_opts.mode, "fs or sf");
  hyb->add_option("--seeds", hyb_opts.seeds, "Directory of seed test cases")->check(CLI::ExistingDirectory);
  hyb->add_flag("--parallel", hyb_opts.parallel, "Run FS targets concurrently");
  hyb->add_option("--threads", hyb_opts.threads, "Worker threads for --parallel");

  auto *base = app.add_subcommand("baselines", "Fuzz-only and symex-only reports");
  add_common(base, base_opts);
  add_hybrid(base, base_opts);
  base->add_option("--seeds", base_opts.seeds, "Directory of seed test cases")->check(CLI::ExistingDirectory);

  auto *t1 = app.add_subcommand("table1", "All four techniques on the twelve generated programs");
  t1->add_option("--out", t1_opts.out, "Also write table1.txt here");
  t1->add_option("--rng-seed", t1_opts.rng_seed, "Seed for all randomized choices");
  add_hybrid(t1, t1_opts);

  // report
  std::vector<std::string> rep_inputs, rep_average;
  std::string rep_program, rep_out;
  auto *rep = app.add_subcommand("report", "Depth tables, plot data and intersections");
  rep->add_option("reports", rep_inputs, "Four JSON campaign reports")->check(CLI::ExistingFile);
  rep->add_option("--program", rep_program, "Program file, enables intersections")->check(CLI::ExistingFile);
  rep->add_option("--average", rep_average, "Average these .dat files instead")->check(CLI::ExistingFile);
  rep->add_option("--out", rep_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*gen)
      return cmd_generate(branching, depth, gen_seed, gen_out);
    if (*cg)
      return cmd_callgraph(cg_file, cg_dot, cg_depths);
    if (*fuzz)
      return cmd_fuzz(fuzz_opts, fuzz_seconds);
    if (*sym)
      return cmd_symex(sym_opts, search, target, sym_seconds);
    if (*hyb)
      return cmd_hybrid(hyb_opts);
    if (*base)
      return cmd_baselines(base_opts);
    if (*t1)
      return cmd_table1(t1_opts);
    if (*rep)
      return cmd_report(rep_inputs, rep_program, rep_average, rep_out);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCampaignFailure;
  }
  return kUsageError;
}
