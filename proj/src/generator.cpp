#include "munchkin/generator.hpp"

#include <cstdio>
#include <stdexcept>
#include <string>

namespace munchkin {

namespace {

std::uint64_t ipow(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t r = 1;
  while (exp--) {
    if (r > UINT64_MAX / base)
      return UINT64_MAX;
    r *= base;
  }
  return r;
}

std::string salt(const GenParams &params) {
  if (params.seed == 0)
    return {};
  // splitmix64 finalizer
  std::uint64_t z = params.seed + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%08x", static_cast<unsigned>(z & 0xffffffffu));
  return buf;
}

class Builder {
public:
  explicit Builder(const GenParams &p) : params_(p) {}

  Program build() {
    Program prog;
    prog.name = "gen_b" + std::to_string(params_.branching) + "_d" +
                std::to_string(params_.depth);
    const auto max = static_cast<std::int32_t>(input_range_size(params_) - 1);

    Function main_fn;
    main_fn.name = "main";
    main_fn.entry_block = "entry";
    add(main_fn, {"entry",
                  {ReadInputInst{"x"}},
                  BranchTerm{CmpKind::Lt, Operand::local("x"), Operand::imm(0),
                             "invalid", "check_upper"}});
    add(main_fn, {"check_upper",
                  {},
                  BranchTerm{CmpKind::Gt, Operand::local("x"), Operand::imm(max),
                             "invalid", "dispatch"}});
    add(main_fn, {"invalid",
                  {ConstInst{"code", -1}, PrintInst{Operand::local("code")}},
                  ReturnTerm{Operand::imm(1)}});
    add(main_fn, {"dispatch",
                  {CallInst{std::nullopt, node_name(params_, 0, max),
                            {Operand::local("x")}}},
                  ReturnTerm{Operand::imm(0)}});
    prog.functions.emplace("main", std::move(main_fn));
    emit_handler(prog, 0, max);
    return prog;
  }

private:
  static void add(Function &fn, Block b) {
    auto id = b.id;
    fn.blocks.emplace(std::move(id), std::move(b));
  }

  // Recursion depth is bounded by d <= 12.
  void emit_handler(Program &prog, std::int64_t lo, std::int64_t hi) {
    Function fn;
    fn.params = {"x"};
    fn.entry_block = "entry";
    if (lo == hi) {
      fn.name = leaf_name(params_, lo);
      add(fn, {"entry", {PrintInst{Operand::local("x")}}, ReturnTerm{}});
      auto name = fn.name;
      prog.functions.emplace(std::move(name), std::move(fn));
      return;
    }
    fn.name = node_name(params_, lo, hi);
    auto parts = split_range(lo, hi, params_.branching);
    auto test_id = [](std::size_t k) {
      return k == 0 ? std::string("entry") : "test_" + std::to_string(k);
    };
    auto child_id = [](std::size_t k) { return "child_" + std::to_string(k); };
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const auto [clo, chi] = parts[k];
      auto callee = clo == chi ? leaf_name(params_, clo)
                               : node_name(params_, clo, chi);
      add(fn, {child_id(k),
               {CallInst{std::nullopt, callee, {Operand::local("x")}}},
               ReturnTerm{}});
      if (k + 1 < parts.size()) {
        auto bound = static_cast<std::int32_t>(parts[k + 1].first);
        auto else_id = k + 2 < parts.size() ? test_id(k + 1) : child_id(k + 1);
        add(fn, {test_id(k),
                 {},
                 BranchTerm{CmpKind::Lt, Operand::local("x"),
                            Operand::imm(bound), child_id(k), else_id}});
      }
    }
    if (parts.size() == 1)
      fn.entry_block = child_id(0);
    auto name = fn.name;
    prog.functions.emplace(std::move(name), std::move(fn));
    for (const auto &[clo, chi] : parts)
      emit_handler(prog, clo, chi);
  }

  const GenParams &params_;
};

} // namespace

void check_params(const GenParams &params) {
  if (params.branching < 2 || params.branching > 16)
    throw std::invalid_argument("branching factor must be in [2, 16]");
  if (params.depth < 1 || params.depth > 12)
    throw std::invalid_argument("depth must be in [1, 12]");
  if (expected_function_count(params.branching, params.depth) >
      kMaxGeneratedFunctions)
    throw std::invalid_argument("program would exceed " +
                                std::to_string(kMaxGeneratedFunctions) +
                                " functions");
}

std::uint64_t expected_function_count(std::uint32_t branching,
                                      std::uint32_t depth) {
  auto top = ipow(branching, depth + 1);
  if (top == UINT64_MAX)
    return UINT64_MAX;
  return 1 + (top - 1) / (branching - 1);
}

std::uint64_t input_range_size(const GenParams &params) {
  return ipow(params.branching, params.depth);
}

Program generate_program(const GenParams &params) {
  check_params(params);
  return Builder(params).build();
}

FunctionName node_name(const GenParams &params, std::int64_t lo,
                       std::int64_t hi) {
  return "node_" + std::to_string(lo) + "_" + std::to_string(hi) + salt(params);
}

FunctionName leaf_name(const GenParams &params, std::int64_t value) {
  return "leaf_" + std::to_string(value) + salt(params);
}

std::vector<std::pair<std::int64_t, std::int64_t>>
split_range(std::int64_t lo, std::int64_t hi, std::uint32_t parts) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  if (hi < lo || parts == 0)
    return out;
  const std::int64_t size = hi - lo + 1;
  const std::int64_t base = size / parts;
  const std::int64_t rem = size % parts;
  std::int64_t start = lo;
  for (std::uint32_t k = 0; k < parts; ++k) {
    std::int64_t len = base + (static_cast<std::int64_t>(k) < rem ? 1 : 0);
    if (len == 0)
      continue;
    out.emplace_back(start, start + len - 1);
    start += len;
  }
  return out;
}

std::set<FunctionName> ground_truth_for(const GenParams &params,
                                        std::int32_t value) {
  check_params(params);
  std::set<FunctionName> out{"main"};
  const auto range = static_cast<std::int64_t>(input_range_size(params));
  if (value < 0 || value >= range)
    return out;
  std::int64_t lo = 0, hi = range - 1;
  while (lo != hi) {
    out.insert(node_name(params, lo, hi));
    for (const auto &[clo, chi] : split_range(lo, hi, params.branching)) {
      if (value >= clo && value <= chi) {
        lo = clo;
        hi = chi;
        break;
      }
    }
  }
  out.insert(leaf_name(params, lo));
  return out;
}

std::map<std::int32_t, std::set<FunctionName>>
ground_truth_coverage(const GenParams &params) {
  check_params(params);
  const auto range = input_range_size(params);
  if (range > kMaxGroundTruthRange)
    throw std::invalid_argument("input range too large for ground truth");
  std::map<std::int32_t, std::set<FunctionName>> out;
  for (std::uint64_t v = 0; v < range; ++v)
    out.emplace(static_cast<std::int32_t>(v),
                ground_truth_for(params, static_cast<std::int32_t>(v)));
  return out;
}

} // namespace munchkin
