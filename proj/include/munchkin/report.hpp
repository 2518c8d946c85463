//===-- report.hpp - Depth tables, intersections and plot data ------------===//
#pragma once

#include "munchkin/callgraph.hpp"
#include "munchkin/executor.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace munchkin {

struct DepthRow {
  std::uint32_t depth = 0;
  std::size_t covered = 0;
  std::size_t total = 0;
  std::uint32_t percent = 0;

  friend bool operator==(const DepthRow &, const DepthRow &) = default;
};

/// round(100 * covered / total), halves rounded up. total must be > 0.
std::uint32_t rounded_percent(std::size_t covered, std::size_t total);

/// One row per depth 0..max reachable depth; depths with no functions are
/// omitted and unreachable functions are ignored.
std::vector<DepthRow> depth_table(const std::set<FunctionName> &covered,
                                  const CallGraph &cg);
inline std::vector<DepthRow> depth_table(const CoverageMap &coverage,
                                         const CallGraph &cg) {
  return depth_table(coverage.functions, cg);
}

/// "depth\tcovered\ttotal\tpercent" header plus one line per row.
std::string depth_table_tsv(const std::vector<DepthRow> &rows);

/// Percent columns side by side, one per technique, for the same depths.
struct DepthComparison {
  std::vector<std::string> techniques;
  std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> rows;
};

/// Throws std::invalid_argument if the tables do not share a depth axis.
DepthComparison align_depth_tables(
    const std::vector<std::string> &techniques,
    const std::vector<std::vector<DepthRow>> &tables);

/// Left-aligned text table: "Depth" then "<technique> (%)" per column,
/// columns separated by two spaces, no trailing whitespace.
std::string render_depth_comparison(const DepthComparison &cmp);

/// Key: sorted technique names. Each pair and the full set, as
/// 100 * |intersection of covered reachable functions| / |reachable|.
/// Requires at least two techniques.
std::map<std::vector<std::string>, double>
intersection_report(const std::map<std::string, std::set<FunctionName>> &named,
                    const CallGraph &cg);

/// Column order of plot files after the depth column.
inline const std::array<std::string, 4> kPlotColumns = {"SymexOnly", "AFL-like",
                                                        "FS", "SF"};

struct PlotRow {
  double depth = 0;
  std::array<double, 4> values{};
  friend bool operator==(const PlotRow &, const PlotRow &) = default;
};
using PlotData = std::vector<PlotRow>;

/// Tables in kPlotColumns order; all four must share a depth axis.
PlotData plot_data(const std::array<std::vector<DepthRow>, 4> &tables);

/// "depth p1 p2 p3 p4" per line, numbers in shortest round-trip form.
std::string format_plot_dat(const PlotData &data);
void emit_plot_dat(const std::array<std::vector<DepthRow>, 4> &tables,
                   const std::string &path);
/// Throws std::runtime_error unless every line has exactly 5 numbers.
PlotData parse_plot_dat(const std::string &text);

/// Mean per depth over the inputs that have that depth.
PlotData average_plot_data(const std::vector<PlotData> &inputs);

} // namespace munchkin
