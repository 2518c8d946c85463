#include "munchkin/text_format.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace munchkin {

ParseError::ParseError(Kind kind, std::size_t line, std::size_t column,
                       const std::string &message)
    : std::runtime_error("line " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      kind_(kind), line_(line), column_(column) {}

namespace {

struct Token {
  enum class Kind { Ident, Int, Punct };
  Kind kind;
  std::string text;
  std::size_t column;
};

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class LineParser {
public:
  LineParser(std::string_view line, std::size_t lineno) : lineno_(lineno) {
    tokenize(line);
  }

  bool empty() const { return toks_.empty(); }
  std::size_t size() const { return toks_.size(); }
  const Token &at(std::size_t i) const { return toks_[i]; }

  bool at_end() const { return pos_ >= toks_.size(); }
  const Token *peek(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
  }

  [[noreturn]] void fail(const std::string &msg) const {
    std::size_t col = at_end() ? end_column_ : toks_[pos_].column;
    throw ParseError(ParseError::Kind::Syntax, lineno_, col, msg);
  }

  std::string ident(const char *what) {
    if (at_end() || toks_[pos_].kind != Token::Kind::Ident)
      fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }

  void expect(std::string_view punct) {
    if (at_end() || toks_[pos_].kind != Token::Kind::Punct ||
        toks_[pos_].text != punct)
      fail("expected '" + std::string(punct) + "'");
    ++pos_;
  }

  bool accept(std::string_view punct) {
    if (!at_end() && toks_[pos_].kind == Token::Kind::Punct &&
        toks_[pos_].text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::int32_t integer() {
    if (at_end() || toks_[pos_].kind != Token::Kind::Int)
      fail("expected integer literal");
    const auto &t = toks_[pos_];
    long long v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || v < INT32_MIN || v > INT32_MAX)
      fail("integer literal out of int32 range");
    ++pos_;
    return static_cast<std::int32_t>(v);
  }

  Operand operand() {
    if (at_end())
      fail("expected operand");
    if (toks_[pos_].kind == Token::Kind::Int)
      return Operand::imm(integer());
    return Operand::local(ident("operand"));
  }

  std::vector<Operand> call_args() {
    expect("(");
    std::vector<Operand> args;
    if (accept(")"))
      return args;
    do {
      args.push_back(operand());
    } while (accept(","));
    expect(")");
    return args;
  }

  void finish() {
    if (!at_end())
      fail("unexpected trailing '" + toks_[pos_].text + "'");
  }

private:
  void tokenize(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size()) {
      char c = line[i];
      if (c == '#')
        break;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      std::size_t start = i;
      if (is_ident_start(c)) {
        while (i < line.size() && is_ident_char(line[i]))
          ++i;
        toks_.push_back({Token::Kind::Ident, std::string(line.substr(start, i - start)), start + 1});
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && i + 1 < line.size() &&
                  std::isdigit(static_cast<unsigned char>(line[i + 1])))) {
        ++i;
        while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
          ++i;
        toks_.push_back({Token::Kind::Int, std::string(line.substr(start, i - start)), start + 1});
      } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
        i += 2;
        toks_.push_back({Token::Kind::Punct, "->", start + 1});
      } else if (c == '(' || c == ')' || c == ',' || c == '=' || c == ':') {
        ++i;
        toks_.push_back({Token::Kind::Punct, std::string(1, c), start + 1});
      } else {
        throw ParseError(ParseError::Kind::Syntax, lineno_, start + 1,
                         std::string("unexpected character '") + c + "'");
      }
    }
    end_column_ = line.size() + 1;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t lineno_;
  std::size_t end_column_ = 1;
};

using LocKey = std::tuple<FunctionName, BlockId, long>;

class ProgramParser {
public:
  Program parse(std::string_view text) {
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      auto line = text.substr(start, nl == std::string_view::npos
                                         ? std::string_view::npos
                                         : nl - start);
      ++lineno;
      parse_line(line, lineno);
      if (nl == std::string_view::npos)
        break;
      start = nl + 1;
    }
    close_function(lineno + 1);
    if (!saw_header_)
      throw ParseError(ParseError::Kind::Syntax, 1, 1,
                       "missing 'program <name>' header");

    auto diags = validate(program_);
    for (const auto &d : diags) {
      if (d.severity != Diagnostic::Severity::Error)
        continue;
      std::size_t line = locate(d.where);
      std::string prefix;
      if (!d.where.function.empty())
        prefix = "in function '" + d.where.function + "': ";
      throw ParseError(ParseError::Kind::Validation, line, 1,
                       prefix + d.message);
    }
    return std::move(program_);
  }

private:
  void parse_line(std::string_view line, std::size_t lineno) {
    LineParser lp(line, lineno);
    if (lp.empty())
      return;
    const auto &head = lp.at(0);
    bool assignment = lp.size() > 1 && lp.at(1).kind == Token::Kind::Punct &&
                      lp.at(1).text == "=";

    if (!assignment && head.text == "program") {
      lp.ident("'program'");
      if (saw_header_)
        lp.fail("duplicate program header");
      program_.name = lp.ident("program name");
      lp.finish();
      saw_header_ = true;
      return;
    }
    if (!saw_header_)
      lp.fail("expected 'program <name>' header");

    if (!assignment && head.text == "func") {
      close_function(lineno);
      lp.ident("'func'");
      Function fn;
      fn.name = lp.ident("function name");
      lp.expect("(");
      if (!lp.accept(")")) {
        do {
          fn.params.push_back(lp.ident("parameter name"));
        } while (lp.accept(","));
        lp.expect(")");
      }
      lp.finish();
      if (program_.functions.count(fn.name))
        lp.fail("duplicate function '" + fn.name + "'");
      lines_[{fn.name, {}, -1}] = lineno;
      current_fn_ = std::move(fn);
      return;
    }
    if (!current_fn_)
      lp.fail("expected 'func' declaration");

    if (!assignment && head.text == "block") {
      if (current_block_)
        lp.fail("block '" + current_block_->id + "' has no terminator");
      lp.ident("'block'");
      Block b;
      b.id = lp.ident("block id");
      lp.expect(":");
      lp.finish();
      if (current_fn_->blocks.count(b.id))
        lp.fail("duplicate block '" + b.id + "'");
      if (current_fn_->blocks.empty())
        current_fn_->entry_block = b.id;
      lines_[{current_fn_->name, b.id, -1}] = lineno;
      current_block_ = std::move(b);
      return;
    }
    if (!current_block_)
      lp.fail("instruction outside of a block");

    auto &blk = *current_block_;
    auto here = [&](long idx) {
      lines_[{current_fn_->name, blk.id, idx}] = lineno;
    };

    if (assignment) {
      LocalName dest = lp.ident("destination");
      lp.expect("=");
      std::string op = lp.ident("'const', 'input', 'call' or an operator");
      here(static_cast<long>(blk.instructions.size()));
      if (op == "const") {
        blk.instructions.push_back(ConstInst{dest, lp.integer()});
      } else if (op == "input") {
        blk.instructions.push_back(ReadInputInst{dest});
      } else if (op == "call") {
        CallInst call;
        call.dest = dest;
        call.callee = lp.ident("callee");
        call.args = lp.call_args();
        blk.instructions.push_back(std::move(call));
      } else if (auto bop = parse_binop(op)) {
        BinOpInst inst{dest, *bop, {}, {}};
        inst.lhs = lp.operand();
        inst.rhs = lp.operand();
        blk.instructions.push_back(std::move(inst));
      } else {
        throw ParseError(ParseError::Kind::Syntax, lineno, lp.at(2).column,
                         "unknown operation '" + op + "'");
      }
      lp.finish();
      return;
    }

    std::string kw = lp.ident("instruction");
    if (kw == "call") {
      here(static_cast<long>(blk.instructions.size()));
      CallInst call;
      call.callee = lp.ident("callee");
      call.args = lp.call_args();
      blk.instructions.push_back(std::move(call));
      lp.finish();
      return;
    }
    if (kw == "print") {
      here(static_cast<long>(blk.instructions.size()));
      blk.instructions.push_back(PrintInst{lp.operand()});
      lp.finish();
      return;
    }
    if (kw == "br") {
      auto cmp_text = lp.ident("comparison");
      auto cmp = parse_cmp(cmp_text);
      if (!cmp)
        throw ParseError(ParseError::Kind::Syntax, lineno, lp.at(1).column,
                         "unknown comparison '" + cmp_text + "'");
      BranchTerm br;
      br.cmp = *cmp;
      br.lhs = lp.operand();
      br.rhs = lp.operand();
      lp.expect("->");
      br.then_block = lp.ident("then block");
      lp.expect(",");
      br.else_block = lp.ident("else block");
      lp.finish();
      blk.terminator = std::move(br);
    } else if (kw == "jmp") {
      JumpTerm j{lp.ident("jump target")};
      lp.finish();
      blk.terminator = std::move(j);
    } else if (kw == "ret") {
      ReturnTerm r;
      if (!lp.at_end())
        r.value = lp.operand();
      lp.finish();
      blk.terminator = std::move(r);
    } else {
      throw ParseError(ParseError::Kind::Syntax, lineno, head.column,
                       "unknown instruction '" + kw + "'");
    }
    lines_[{current_fn_->name, blk.id, -2}] = lineno;
    auto id = blk.id;
    current_fn_->blocks.emplace(id, std::move(blk));
    current_block_.reset();
  }

  void close_function(std::size_t lineno) {
    if (current_block_)
      throw ParseError(ParseError::Kind::Syntax, lineno, 1,
                       "block '" + current_block_->id +
                           "' has no terminator");
    if (!current_fn_)
      return;
    if (current_fn_->blocks.empty())
      throw ParseError(ParseError::Kind::Syntax, lines_[{current_fn_->name, {}, -1}], 1,
                       "function '" + current_fn_->name + "' has no blocks");
    auto name = current_fn_->name;
    program_.functions.emplace(name, std::move(*current_fn_));
    current_fn_.reset();
  }

  std::size_t locate(const IrLocation &where) const {
    auto find = [&](const LocKey &k) -> std::size_t {
      auto it = lines_.find(k);
      return it == lines_.end() ? 0 : it->second;
    };
    if (where.function.empty())
      return 1;
    if (where.block.empty())
      return std::max<std::size_t>(1, find({where.function, {}, -1}));
    std::size_t l = where.instruction
                        ? find({where.function, where.block,
                                static_cast<long>(*where.instruction)})
                        : find({where.function, where.block, -2});
    if (l == 0)
      l = find({where.function, where.block, -1});
    return std::max<std::size_t>(1, l);
  }

  Program program_;
  bool saw_header_ = false;
  std::optional<Function> current_fn_;
  std::optional<Block> current_block_;
  std::map<LocKey, std::size_t> lines_;
};

void write_operand(std::ostream &os, const Operand &op) {
  if (op.is_local())
    os << op.name();
  else
    os << op.literal();
}

void write_args(std::ostream &os, const std::vector<Operand> &args) {
  os << "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i)
      os << ", ";
    write_operand(os, args[i]);
  }
  os << ")";
}

void write_block(std::ostream &os, const Block &b) {
  os << "block " << b.id << ":\n";
  for (const auto &inst : b.instructions) {
    os << "  ";
    std::visit(
        [&](const auto &i) {
          using T = std::decay_t<decltype(i)>;
          if constexpr (std::is_same_v<T, ConstInst>) {
            os << i.dest << " = const " << i.value;
          } else if constexpr (std::is_same_v<T, ReadInputInst>) {
            os << i.dest << " = input";
          } else if constexpr (std::is_same_v<T, BinOpInst>) {
            os << i.dest << " = " << to_string(i.op) << " ";
            write_operand(os, i.lhs);
            os << " ";
            write_operand(os, i.rhs);
          } else if constexpr (std::is_same_v<T, CallInst>) {
            if (i.dest)
              os << *i.dest << " = ";
            os << "call " << i.callee;
            write_args(os, i.args);
          } else {
            os << "print ";
            write_operand(os, i.operand);
          }
        },
        inst);
    os << "\n";
  }
  os << "  ";
  std::visit(
      [&](const auto &t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, BranchTerm>) {
          os << "br " << to_string(t.cmp) << " ";
          write_operand(os, t.lhs);
          os << " ";
          write_operand(os, t.rhs);
          os << " -> " << t.then_block << ", " << t.else_block;
        } else if constexpr (std::is_same_v<T, JumpTerm>) {
          os << "jmp " << t.target;
        } else {
          os << "ret";
          if (t.value) {
            os << " ";
            write_operand(os, *t.value);
          }
        }
      },
      b.terminator);
  os << "\n";
}

void write_function(std::ostream &os, const Function &fn) {
  os << "func " << fn.name << "(";
  for (std::size_t i = 0; i < fn.params.size(); ++i)
    os << (i ? ", " : "") << fn.params[i];
  os << ")\n";
  if (auto it = fn.blocks.find(fn.entry_block); it != fn.blocks.end())
    write_block(os, it->second);
  for (const auto &[id, b] : fn.blocks)
    if (id != fn.entry_block)
      write_block(os, b);
}

} // namespace

Program parse_program(std::string_view text) {
  return ProgramParser().parse(text);
}

std::string serialize_program(const Program &program) {
  std::ostringstream os;
  os << "program " << program.name << "\n";
  if (auto it = program.functions.find(program.entry);
      it != program.functions.end()) {
    os << "\n";
    write_function(os, it->second);
  }
  for (const auto &[name, fn] : program.functions) {
    if (name == program.entry)
      continue;
    os << "\n";
    write_function(os, fn);
  }
  return os.str();
}

Program load_program(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

void save_program(const Program &program, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path + "'");
  out << serialize_program(program);
  if (!out)
    throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace munchkin
