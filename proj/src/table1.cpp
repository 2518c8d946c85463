#include "munchkin/table1.hpp"

#include "munchkin/generator.hpp"

#include <iomanip>
#include <sstream>

namespace munchkin {

std::vector<Table1Row> run_table1(const HybridConfig &base) {
  std::vector<Table1Row> rows;
  for (std::size_t i = 0; i < kTable1Params.size(); ++i) {
    auto [b, d] = kTable1Params[i];
    auto program = generate_program({b, d, 0});
    HybridConfig fs = base;
    fs.mode = HybridMode::FS;
    HybridConfig sf = base;
    sf.mode = HybridMode::SF;

    auto fuzz = run_fuzz_only(program, base);
    auto symex = run_symex_only(program, base);
    auto fs_report = run_fs(program, fs);
    auto sf_report = run_sf(program, sf);

    Table1Row row;
    row.id = "P" + std::to_string(i + 1);
    row.branching = b;
    row.depth = d;
    row.total_functions = program.functions.size();
    row.fuzz_percent = fuzz.coverage_percent();
    row.symex_percent = symex.coverage_percent();
    row.fs_percent = fs_report.coverage_percent();
    row.sf_percent = sf_report.coverage_percent();
    row.symex_queries = symex.solver_stats.queries;
    row.fs_queries = fs_report.solver_stats.queries;
    rows.push_back(row);
  }
  return rows;
}

std::string render_table1(const std::vector<Table1Row> &rows) {
  std::ostringstream out;
  out << std::left << std::setw(5) << "Prog" << std::right << std::setw(4) << "b"
      << std::setw(4) << "d" << std::setw(7) << "funcs" << std::setw(8) << "AFL%"
      << std::setw(8) << "Symex%" << std::setw(8) << "FS%" << std::setw(8) << "SF%"
      << std::setw(10) << "Symex q" << std::setw(10) << "FS q" << '\n';
  out << std::fixed << std::setprecision(0);
  for (const auto &r : rows)
    out << std::left << std::setw(5) << r.id << std::right << std::setw(4)
        << r.branching << std::setw(4) << r.depth << std::setw(7)
        << r.total_functions << std::setw(8) << r.fuzz_percent << std::setw(8)
        << r.symex_percent << std::setw(8) << r.fs_percent << std::setw(8)
        << r.sf_percent << std::setw(10) << r.symex_queries << std::setw(10)
        << r.fs_queries << '\n';
  return out.str();
}

} // namespace munchkin
