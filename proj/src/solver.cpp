#include "munchkin/solver.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace munchkin {

std::string_view to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Sat: return "sat";
  case SolveStatus::Unsat: return "unsat";
  case SolveStatus::Unknown: return "unknown";
  }
  return "?";
}

SolverStats &SolverStats::operator+=(const SolverStats &o) {
  queries += o.queries;
  sat += o.sat;
  unsat += o.unsat;
  unknown += o.unknown;
  cache_hits += o.cache_hits;
  return *this;
}

SolverStats operator-(SolverStats a, const SolverStats &b) {
  a.queries -= b.queries;
  a.sat -= b.sat;
  a.unsat -= b.unsat;
  a.unknown -= b.unknown;
  a.cache_hits -= b.cache_hits;
  return a;
}

namespace {

using i128 = __int128;

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0)))
    ++q;
  return q;
}

struct Domain {
  i128 lo = INT32_MIN;
  i128 hi = INT32_MAX;
  bool empty() const { return lo > hi; }
  i128 size() const { return hi - lo + 1; }
  std::int32_t closest_to_zero() const {
    if (lo <= 0 && hi >= 0)
      return 0;
    return static_cast<std::int32_t>(lo > 0 ? lo : hi);
  }
};

struct Bounds {
  i128 lo;
  i128 hi;
};

Bounds bounds(const SymValue &v, const std::vector<Domain> &dom) {
  Bounds b{v.constant_term(), v.constant_term()};
  for (const auto &t : v.terms()) {
    i128 x = static_cast<i128>(t.coeff) * dom[t.var].lo;
    i128 y = static_cast<i128>(t.coeff) * dom[t.var].hi;
    b.lo += std::min(x, y);
    b.hi += std::max(x, y);
  }
  return b;
}

bool fits_int32(const Bounds &b) {
  return b.lo >= INT32_MIN && b.hi <= INT32_MAX;
}

/// sum(coeffs[i] * x_i) + constant, exact (no wrap).
struct Linear {
  std::map<VarIndex, i128> coeffs;
  i128 constant = 0;
};

Linear difference(const SymValue &a, const SymValue &b) {
  Linear l;
  l.constant = static_cast<i128>(a.constant_term()) - b.constant_term();
  for (const auto &t : a.terms())
    l.coeffs[t.var] += t.coeff;
  for (const auto &t : b.terms())
    l.coeffs[t.var] -= t.coeff;
  for (auto it = l.coeffs.begin(); it != l.coeffs.end();)
    it = it->second == 0 ? l.coeffs.erase(it) : std::next(it);
  return l;
}

enum class Step { Unchanged, Changed, Empty };

// sum(a_i x_i) <= k
Step propagate_le(const std::map<VarIndex, i128> &a, i128 k,
                  std::vector<Domain> &dom) {
  i128 minsum = 0;
  for (const auto &[v, c] : a)
    minsum += std::min(c * dom[v].lo, c * dom[v].hi);
  if (minsum > k)
    return Step::Empty;
  Step step = Step::Unchanged;
  for (const auto &[v, c] : a) {
    i128 own = std::min(c * dom[v].lo, c * dom[v].hi);
    i128 slack = k - (minsum - own);
    auto &d = dom[v];
    if (c > 0) {
      i128 nh = floor_div(slack, c);
      if (nh < d.hi) {
        d.hi = nh;
        step = Step::Changed;
      }
    } else {
      i128 nl = ceil_div(slack, c);
      if (nl > d.lo) {
        d.lo = nl;
        step = Step::Changed;
      }
    }
    if (d.empty())
      return Step::Empty;
  }
  return step;
}

Step propagate(const Constraint &c, std::vector<Domain> &dom) {
  auto lb = bounds(c.lhs, dom);
  auto rb = bounds(c.rhs, dom);
  if (!fits_int32(lb) || !fits_int32(rb))
    return Step::Unchanged;
  Linear e = difference(c.lhs, c.rhs);
  auto negated = [](std::map<VarIndex, i128> m) {
    for (auto &[_, v] : m)
      v = -v;
    return m;
  };
  auto merge = [](Step a, Step b) {
    if (a == Step::Empty || b == Step::Empty)
      return Step::Empty;
    return a == Step::Changed || b == Step::Changed ? Step::Changed
                                                    : Step::Unchanged;
  };
  if (e.coeffs.empty()) {
    bool ok = evaluate(c.cmp, static_cast<std::int32_t>(lb.lo),
                       static_cast<std::int32_t>(rb.lo));
    return ok ? Step::Unchanged : Step::Empty;
  }
  switch (c.cmp) {
  case CmpKind::Lt: return propagate_le(e.coeffs, -1 - e.constant, dom);
  case CmpKind::Le: return propagate_le(e.coeffs, -e.constant, dom);
  case CmpKind::Gt: return propagate_le(negated(e.coeffs), e.constant - 1, dom);
  case CmpKind::Ge: return propagate_le(negated(e.coeffs), e.constant, dom);
  case CmpKind::Eq: {
    auto s = propagate_le(e.coeffs, -e.constant, dom);
    if (s == Step::Empty)
      return s;
    return merge(s, propagate_le(negated(e.coeffs), e.constant, dom));
  }
  case CmpKind::Ne: {
    if (e.coeffs.size() != 1)
      return Step::Unchanged;
    auto [v, a] = *e.coeffs.begin();
    if ((-e.constant) % a != 0)
      return Step::Unchanged;
    i128 hole = -e.constant / a;
    auto &d = dom[v];
    Step s = Step::Unchanged;
    if (d.lo == hole) {
      ++d.lo;
      s = Step::Changed;
    }
    if (d.hi == hole) {
      --d.hi;
      s = Step::Changed;
    }
    return d.empty() ? Step::Empty : s;
  }
  }
  return Step::Unchanged;
}

bool satisfies(const std::vector<const Constraint *> &cs, const InputVector &m) {
  return std::all_of(cs.begin(), cs.end(),
                     [&](const Constraint *c) { return c->holds(m); });
}

std::vector<std::int32_t> repair_values(const Domain &d) {
  std::vector<i128> raw{d.closest_to_zero(), i128(d.closest_to_zero()) + 1,
                        i128(d.closest_to_zero()) - 1, d.lo, d.hi, d.lo + 1,
                        d.hi - 1};
  std::vector<std::int32_t> out;
  for (auto v : raw)
    if (v >= d.lo && v <= d.hi &&
        std::find(out.begin(), out.end(), static_cast<std::int32_t>(v)) == out.end())
      out.push_back(static_cast<std::int32_t>(v));
  return out;
}

} // namespace

SolveResult solve_uncached(const PathCondition &pc, std::size_t num_vars,
                           const SolverOptions &opts) {
  if (pc.num_vars() > num_vars)
    throw std::invalid_argument("path condition mentions more variables than num_vars");

  std::vector<Domain> dom(num_vars);
  std::vector<const Constraint *> linear;
  bool has_opaque = false;
  for (const auto &c : pc.constraints) {
    if (c.has_opaque())
      has_opaque = true;
    else
      linear.push_back(&c);
  }

  for (std::uint32_t round = 0; round < opts.propagation_rounds; ++round) {
    bool changed = false;
    for (const auto *c : linear) {
      auto s = propagate(*c, dom);
      if (s == Step::Empty)
        return {SolveStatus::Unsat, {}};
      changed |= s == Step::Changed;
    }
    if (!changed)
      break;
  }

  InputVector candidate(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i)
    candidate[i] = dom[i].closest_to_zero();

  if (has_opaque)
    return {SolveStatus::Unknown, candidate};
  if (satisfies(linear, candidate))
    return {SolveStatus::Sat, candidate};

  // Repair: small perturbations around the candidate.
  std::vector<std::vector<std::int32_t>> choices;
  for (const auto &d : dom)
    choices.push_back(repair_values(d));
  if (num_vars <= 4) {
    std::vector<std::size_t> idx(num_vars, 0);
    InputVector m(num_vars);
    while (true) {
      for (std::size_t i = 0; i < num_vars; ++i)
        m[i] = choices[i][idx[i]];
      if (satisfies(linear, m))
        return {SolveStatus::Sat, m};
      std::size_t i = 0;
      while (i < num_vars && ++idx[i] == choices[i].size())
        idx[i++] = 0;
      if (i == num_vars)
        break;
    }
  } else {
    for (std::size_t i = 0; i < num_vars; ++i) {
      InputVector m = candidate;
      for (auto v : choices[i]) {
        m[i] = v;
        if (satisfies(linear, m))
          return {SolveStatus::Sat, m};
      }
    }
  }

  i128 points = 1;
  for (const auto &d : dom) {
    points *= d.size();
    if (points > static_cast<i128>(opts.enumeration_cap))
      return {SolveStatus::Unknown, candidate};
  }
  InputVector m(num_vars);
  for (std::size_t i = 0; i < num_vars; ++i)
    m[i] = static_cast<std::int32_t>(dom[i].lo);
  while (true) {
    if (satisfies(linear, m))
      return {SolveStatus::Sat, m};
    std::size_t i = 0;
    while (i < num_vars) {
      if (m[i] < dom[i].hi) {
        ++m[i];
        break;
      }
      m[i] = static_cast<std::int32_t>(dom[i].lo);
      ++i;
    }
    if (i == num_vars)
      return {SolveStatus::Unsat, {}};
  }
}

std::string Solver::key(const PathCondition &pc, std::size_t num_vars) {
  return std::to_string(num_vars) + "|" + pc.canonical_key();
}

std::optional<SolveResult> Solver::lookup(const PathCondition &pc,
                                          std::size_t num_vars) {
  if (!opts_.use_cache)
    return std::nullopt;
  auto it = cache_.find(key(pc, num_vars));
  if (it == cache_.end())
    return std::nullopt;
  ++stats_.cache_hits;
  return it->second;
}

SolveResult Solver::solve(const PathCondition &pc, std::size_t num_vars) {
  if (auto hit = lookup(pc, num_vars))
    return *hit;
  auto r = solve_uncached(pc, num_vars, opts_);
  ++stats_.queries;
  switch (r.status) {
  case SolveStatus::Sat: ++stats_.sat; break;
  case SolveStatus::Unsat: ++stats_.unsat; break;
  case SolveStatus::Unknown: ++stats_.unknown; break;
  }
  if (opts_.use_cache)
    cache_.emplace(key(pc, num_vars), r);
  return r;
}

} // namespace munchkin
