#include "munchkin/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace munchkin {

std::uint32_t rounded_percent(std::size_t covered, std::size_t total) {
  if (total == 0)
    throw std::invalid_argument("percent of an empty row");
  return static_cast<std::uint32_t>((200 * covered + total) / (2 * total));
}

std::vector<DepthRow> depth_table(const std::set<FunctionName> &covered,
                                  const CallGraph &cg) {
  std::map<std::uint32_t, DepthRow> rows;
  for (const auto &[fn, d] : cg.depths) {
    if (d == kUnreachable)
      continue;
    auto &row = rows[d];
    row.depth = d;
    ++row.total;
    if (covered.count(fn))
      ++row.covered;
  }
  std::vector<DepthRow> out;
  for (auto &[_, row] : rows) {
    row.percent = rounded_percent(row.covered, row.total);
    out.push_back(row);
  }
  return out;
}

std::string depth_table_tsv(const std::vector<DepthRow> &rows) {
  std::ostringstream os;
  os << "depth\tcovered\ttotal\tpercent\n";
  for (const auto &r : rows)
    os << r.depth << '\t' << r.covered << '\t' << r.total << '\t' << r.percent
       << '\n';
  return os.str();
}

DepthComparison align_depth_tables(
    const std::vector<std::string> &techniques,
    const std::vector<std::vector<DepthRow>> &tables) {
  if (techniques.size() != tables.size())
    throw std::invalid_argument("one table per technique required");
  DepthComparison cmp;
  cmp.techniques = techniques;
  if (tables.empty())
    return cmp;
  for (std::size_t r = 0; r < tables[0].size(); ++r) {
    std::vector<std::uint32_t> values;
    for (const auto &t : tables) {
      if (t.size() != tables[0].size() || t[r].depth != tables[0][r].depth)
        throw std::invalid_argument("depth tables are not aligned");
      values.push_back(t[r].percent);
    }
    cmp.rows.emplace_back(tables[0][r].depth, std::move(values));
  }
  return cmp;
}

std::string render_depth_comparison(const DepthComparison &cmp) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Depth"};
  for (const auto &t : cmp.techniques)
    header.push_back(t + " (%)");
  cells.push_back(header);
  for (const auto &[depth, values] : cmp.rows) {
    std::vector<std::string> line{std::to_string(depth)};
    for (auto v : values)
      line.push_back(std::to_string(v));
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto &line : cells)
    for (std::size_t c = 0; c < line.size(); ++c)
      width[c] = std::max(width[c], line[c].size());

  std::ostringstream os;
  for (const auto &line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      os << line[c];
      if (c + 1 < line.size())
        os << std::string(width[c] - line[c].size() + 2, ' ');
    }
    os << '\n';
  }
  return os.str();
}

std::map<std::vector<std::string>, double>
intersection_report(const std::map<std::string, std::set<FunctionName>> &named,
                    const CallGraph &cg) {
  if (named.size() < 2)
    throw std::invalid_argument("intersection needs at least two techniques");
  const auto reachable = cg.reachable_functions();
  if (reachable.empty())
    throw std::invalid_argument("no reachable functions");

  auto percent_of = [&](const std::vector<std::string> &names) {
    std::size_t n = 0;
    for (const auto &fn : reachable)
      if (std::all_of(names.begin(), names.end(),
                      [&](const auto &t) { return named.at(t).count(fn) != 0; }))
        ++n;
    return 100.0 * static_cast<double>(n) / static_cast<double>(reachable.size());
  };

  std::vector<std::string> all;
  for (const auto &[name, _] : named)
    all.push_back(name);
  std::map<std::vector<std::string>, double> out;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      std::vector<std::string> pair{all[i], all[j]};
      out[pair] = percent_of(pair);
    }
  out[all] = percent_of(all);
  return out;
}

PlotData plot_data(const std::array<std::vector<DepthRow>, 4> &tables) {
  std::vector<std::string> names(kPlotColumns.begin(), kPlotColumns.end());
  auto cmp = align_depth_tables(
      names, std::vector<std::vector<DepthRow>>(tables.begin(), tables.end()));
  PlotData out;
  for (const auto &[depth, values] : cmp.rows) {
    PlotRow row;
    row.depth = depth;
    for (std::size_t i = 0; i < 4; ++i)
      row.values[i] = values[i];
    out.push_back(row);
  }
  return out;
}

namespace {

std::string number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

} // namespace

std::string format_plot_dat(const PlotData &data) {
  std::string out;
  for (const auto &row : data) {
    out += number(row.depth);
    for (double v : row.values)
      out += " " + number(v);
    out += "\n";
  }
  return out;
}

void emit_plot_dat(const std::array<std::vector<DepthRow>, 4> &tables,
                   const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  out << format_plot_dat(plot_data(tables));
  if (!out)
    throw std::runtime_error("write failed for '" + path + "'");
}

PlotData parse_plot_dat(const std::string &text) {
  PlotData out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    std::istringstream ls(line);
    std::vector<double> nums;
    std::string tok;
    while (ls >> tok) {
      double v = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc{} || p != tok.data() + tok.size())
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": not a number: '" + tok + "'");
      nums.push_back(v);
    }
    if (nums.size() != 5)
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": expected 5 columns, got " +
                               std::to_string(nums.size()));
    out.push_back({nums[0], {nums[1], nums[2], nums[3], nums[4]}});
  }
  return out;
}

PlotData average_plot_data(const std::vector<PlotData> &inputs) {
  std::map<double, std::pair<std::array<double, 4>, std::size_t>> acc;
  for (const auto &data : inputs)
    for (const auto &row : data) {
      auto &[sum, n] = acc[row.depth];
      for (std::size_t i = 0; i < 4; ++i)
        sum[i] += row.values[i];
      ++n;
    }
  PlotData out;
  for (const auto &[depth, entry] : acc) {
    PlotRow row;
    row.depth = depth;
    for (std::size_t i = 0; i < 4; ++i)
      row.values[i] = entry.first[i] / static_cast<double>(entry.second);
    out.push_back(row);
  }
  return out;
}

} // namespace munchkin
