#include "munchkin/symbolic.hpp"

#include "munchkin/executor.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace munchkin {

namespace {

std::int32_t wrap(std::uint32_t v) { return static_cast<std::int32_t>(v); }
std::uint32_t bits(std::int32_t v) { return static_cast<std::uint32_t>(v); }

} // namespace

SymValue SymValue::constant(std::int32_t c) {
  SymValue v;
  v.constant_ = c;
  return v;
}

SymValue SymValue::variable(VarIndex var) {
  SymValue v;
  v.terms_.push_back({var, 1});
  return v;
}

SymValue SymValue::opaque() {
  SymValue v;
  v.opaque_ = true;
  return v;
}

VarIndex SymValue::num_vars() const {
  return terms_.empty() ? 0 : terms_.back().var + 1;
}

std::int32_t SymValue::evaluate(const std::vector<std::int32_t> &model) const {
  std::uint32_t acc = bits(constant_);
  for (const auto &t : terms_) {
    std::int32_t x = t.var < model.size() ? model[t.var] : 0;
    acc += bits(t.coeff) * bits(x);
  }
  return wrap(acc);
}

SymValue SymValue::binop(BinOpKind op, const SymValue &a, const SymValue &b) {
  if (a.is_constant() && b.is_constant()) {
    std::int32_t out = 0;
    if (!apply_binop(op, a.constant_, b.constant_, out))
      return opaque();
    return constant(out);
  }
  if (a.opaque_ || b.opaque_)
    return opaque();

  auto scaled = [](const SymValue &v, std::int32_t k) {
    SymValue out;
    out.constant_ = wrap(bits(v.constant_) * bits(k));
    for (const auto &t : v.terms_) {
      auto c = wrap(bits(t.coeff) * bits(k));
      if (c != 0)
        out.terms_.push_back({t.var, c});
    }
    return out;
  };
  auto sum = [](const SymValue &x, const SymValue &y, bool subtract) {
    SymValue out;
    auto sign = [&](std::int32_t c) {
      return subtract ? wrap(0u - bits(c)) : c;
    };
    out.constant_ = wrap(bits(x.constant_) + bits(sign(y.constant_)));
    std::map<VarIndex, std::uint32_t> acc;
    for (const auto &t : x.terms_)
      acc[t.var] += bits(t.coeff);
    for (const auto &t : y.terms_)
      acc[t.var] += bits(sign(t.coeff));
    for (const auto &[var, c] : acc)
      if (c != 0)
        out.terms_.push_back({var, wrap(c)});
    return out;
  };

  switch (op) {
  case BinOpKind::Add: return sum(a, b, false);
  case BinOpKind::Sub: return sum(a, b, true);
  case BinOpKind::Mul:
    if (b.is_constant())
      return scaled(a, b.constant_);
    if (a.is_constant())
      return scaled(b, a.constant_);
    return opaque();
  case BinOpKind::Div:
    if (b.is_constant() && b.constant_ == 1)
      return a;
    return opaque();
  case BinOpKind::Mod:
    if (b.is_constant() && (b.constant_ == 1 || b.constant_ == -1))
      return constant(0);
    return opaque();
  }
  return opaque();
}

std::string SymValue::to_string() const {
  if (opaque_)
    return "?";
  std::ostringstream os;
  bool first = true;
  for (const auto &t : terms_) {
    if (!first)
      os << " + ";
    first = false;
    if (t.coeff != 1)
      os << t.coeff << "*";
    os << "x" << t.var;
  }
  if (first)
    os << constant_;
  else if (constant_ != 0)
    os << " + " << constant_;
  return os.str();
}

bool Constraint::holds(const std::vector<std::int32_t> &model) const {
  return evaluate(cmp, lhs.evaluate(model), rhs.evaluate(model));
}

Constraint Constraint::canonical() const {
  Constraint c = *this;
  if (c.cmp == CmpKind::Gt || c.cmp == CmpKind::Ge) {
    c.cmp = swap_sides(c.cmp);
    std::swap(c.lhs, c.rhs);
  }
  if ((c.cmp == CmpKind::Eq || c.cmp == CmpKind::Ne) && c.rhs < c.lhs)
    std::swap(c.lhs, c.rhs);
  return c;
}

std::string Constraint::to_string() const {
  return "(" + lhs.to_string() + " " + std::string(munchkin::to_string(cmp)) +
         " " + rhs.to_string() + ")";
}

VarIndex PathCondition::num_vars() const {
  VarIndex n = 0;
  for (const auto &c : constraints)
    n = std::max({n, c.lhs.num_vars(), c.rhs.num_vars()});
  return n;
}

std::string PathCondition::canonical_key() const {
  std::vector<Constraint> cs;
  cs.reserve(constraints.size());
  for (const auto &c : constraints)
    cs.push_back(c.canonical());
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  std::string key;
  for (const auto &c : cs)
    key += c.to_string();
  return key;
}

} // namespace munchkin
