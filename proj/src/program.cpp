#include "futmc/program.hpp"

#include <cctype>
#include <functional>
#include <sstream>

namespace futmc {

namespace {

enum class Tok { End, Int, Ident, Punct, ModeTag, Par };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Val value = 0;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.line, tok_.col);
  }

private:
  void advance() {
    skip_ws();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
      tok_.kind = Tok::Int;
      tok_.text = src_.substr(start, pos_ - start);
      tok_.value = std::stoll(tok_.text);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (c == '^') {
      bump();
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) bump();
      tok_.kind = Tok::ModeTag;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    if (c == '|') {
      int n = 0;
      while (pos_ < src_.size() && src_[pos_] == '|') {
        bump();
        ++n;
      }
      if (n >= 3) {
        tok_.kind = Tok::Par;
        tok_.text = "|||";
      } else {
        tok_.kind = Tok::Punct;
        tok_.text = "|";
      }
      return;
    }
    // multi-char punct
    static const char* two[] = {":=", "!=", "<=", ">=", "&&"};
    for (const char* p : two) {
      if (src_.compare(pos_, 2, p) == 0) {
        tok_.kind = Tok::Punct;
        tok_.text = p;
        bump();
        bump();
        if (tok_.text == "&&") tok_.text = "&";
        return;
      }
    }
    tok_.kind = Tok::Punct;
    tok_.text = std::string(1, c);
    bump();
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void bump() {
    ++col_;
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
public:
  explicit Parser(const std::string& src) : lx_(src) {}

  Program parse() {
    Program p;
    parse_init(p);
    ThreadId tid = 1;
    while (true) {
      p.threads[tid] = parse_thread();
      if (lx_.peek().kind == Tok::Par) {
        lx_.next();
        ++tid;
        continue;
      }
      break;
    }
    if (lx_.peek().kind != Tok::End) lx_.fail("unexpected input after program");
    finish(p);
    return p;
  }

private:
  Lexer lx_;
  std::set<std::string> bracket_names_;                 // names used as [var]
  std::vector<std::pair<std::string, Token>> bare_uses_;  // register-position uses
  std::vector<std::pair<ExprPtr, Token>> guards_;
  std::map<std::string, Token> labels_seen_;
  std::map<std::string, Val> init_entries_;

  bool punct(const char* s) {
    return lx_.peek().kind == Tok::Punct && lx_.peek().text == s;
  }
  bool ident(const char* s) {
    return lx_.peek().kind == Tok::Ident && lx_.peek().text == s;
  }
  Token expect_punct(const char* s) {
    if (!punct(s)) lx_.fail(std::string("expected '") + s + "'");
    return lx_.next();
  }
  Token expect_ident() {
    if (lx_.peek().kind != Tok::Ident) lx_.fail("expected identifier");
    return lx_.next();
  }

  void parse_init(Program& p) {
    if (!(ident("init") || ident("Init"))) return;
    lx_.next();
    expect_punct(":");
    while (true) {
      Token name = expect_ident();
      std::vector<std::string> chain{name.text};
      expect_punct("=");
      // chained form: x = y = 0
      while (lx_.peek().kind == Tok::Ident) {
        chain.push_back(lx_.next().text);
        expect_punct("=");
      }
      bool negate = false;
      if (punct("-")) {
        lx_.next();
        negate = true;
      }
      if (lx_.peek().kind != Tok::Int) lx_.fail("expected integer in init line");
      Val v = lx_.next().value;
      if (negate) v = -v;
      for (auto& n : chain) init_entries_[n] = v;
      if (punct(",")) {
        lx_.next();
        continue;
      }
      break;
    }
    (void)p;
  }

  Command parse_thread() {
    std::vector<Command> stmts;
    while (true) {
      stmts.push_back(parse_stmt());
      if (punct(";")) {
        lx_.next();
        // tolerate a trailing semicolon before a closer
        if (punct("}") || lx_.peek().kind == Tok::End || lx_.peek().kind == Tok::Par) break;
        continue;
      }
      break;
    }
    if (stmts.size() == 1) return std::move(stmts.front());
    return Command::make_seq(std::move(stmts));
  }

  Command parse_stmt() {
    if (ident("if")) {
      lx_.next();
      Token gt = lx_.peek();
      ExprPtr guard = parse_expr();
      guards_.emplace_back(guard, gt);
      if (!ident("then")) lx_.fail("expected 'then'");
      lx_.next();
      expect_punct("{");
      Command then_branch = parse_thread();
      expect_punct("}");
      Command else_branch = Command::make_seq({});
      if (ident("else")) {
        lx_.next();
        expect_punct("{");
        else_branch = parse_thread();
        expect_punct("}");
      }
      Command c;
      c.kind = Command::Kind::If;
      c.guard = guard;
      c.children.push_back(std::move(then_branch));
      c.children.push_back(std::move(else_branch));
      return c;
    }
    if (ident("while")) {
      lx_.next();
      Token gt = lx_.peek();
      ExprPtr guard = parse_expr();
      guards_.emplace_back(guard, gt);
      if (!ident("do")) lx_.fail("expected 'do'");
      lx_.next();
      expect_punct("{");
      Command body = parse_thread();
      expect_punct("}");
      Command c;
      c.kind = Command::Kind::While;
      c.guard = guard;
      c.children.push_back(std::move(body));
      return c;
    }
    // label ":" atomic
    Token lab = lx_.next();
    if (lab.kind != Tok::Int && lab.kind != Tok::Ident) lx_.fail("expected statement label");
    expect_punct(":");
    Atomic a = parse_atomic();
    a.label = lab.text;
    auto [it, fresh] = labels_seen_.emplace(a.label, lab);
    if (!fresh)
      throw ParseError("duplicate label '" + a.label + "'", lab.line, lab.col);
    return Command::make_atom(std::move(a));
  }

  Atomic parse_atomic() {
    Atomic a;
    if (ident("skip")) {
      lx_.next();
      a.kind = AtomKind::Skip;
      return a;
    }
    if (ident("upd")) {
      Token t = lx_.next();
      if (lx_.peek().kind != Tok::ModeTag || lx_.peek().text != "RA")
        throw ParseError("expected '^RA' after 'upd'", t.line, t.col);
      lx_.next();
      expect_punct("(");
      expect_punct("[");
      Token var = expect_ident();
      bracket_names_.insert(var.text);
      expect_punct("]");
      expect_punct(",");
      ExprPtr old_e = parse_expr();
      expect_punct(",");
      ExprPtr new_e = parse_expr();
      expect_punct(")");
      a.kind = AtomKind::Update;
      a.var = var.text;
      a.expr = old_e;
      a.expr2 = new_e;
      return a;
    }
    if (punct("[")) {
      // store
      lx_.next();
      Token var = expect_ident();
      bracket_names_.insert(var.text);
      expect_punct("]");
      expect_punct(":=");
      if (lx_.peek().kind == Tok::ModeTag) {
        Token m = lx_.next();
        if (m.text != "R") throw ParseError("store annotation must be ^R", m.line, m.col);
        a.release = true;
      }
      a.kind = AtomKind::Store;
      a.var = var.text;
      a.expr = parse_expr();
      return a;
    }
    // load or register assignment
    Token reg = expect_ident();
    bare_uses_.emplace_back(reg.text, reg);
    expect_punct(":=");
    if (lx_.peek().kind == Tok::ModeTag) {
      Token m = lx_.next();
      if (m.text != "A") throw ParseError("load annotation must be ^A", m.line, m.col);
      a.acquire = true;
      expect_punct("[");
      Token var = expect_ident();
      bracket_names_.insert(var.text);
      expect_punct("]");
      a.kind = AtomKind::Load;
      a.var = var.text;
      a.reg = reg.text;
      return a;
    }
    if (punct("[")) {
      lx_.next();
      Token var = expect_ident();
      bracket_names_.insert(var.text);
      expect_punct("]");
      a.kind = AtomKind::Load;
      a.var = var.text;
      a.reg = reg.text;
      return a;
    }
    a.kind = AtomKind::RegAssign;
    a.reg = reg.text;
    a.expr = parse_expr();
    return a;
  }

  // precedence: | < & < comparisons < additive < multiplicative < unary
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr e = parse_and();
    while (punct("|")) {
      lx_.next();
      e = Expr::bin(BinOp::Or, e, parse_and());
    }
    return e;
  }

  ExprPtr parse_and() {
    ExprPtr e = parse_cmp();
    while (punct("&")) {
      lx_.next();
      e = Expr::bin(BinOp::And, e, parse_cmp());
    }
    return e;
  }

  ExprPtr parse_cmp() {
    ExprPtr e = parse_add();
    while (true) {
      BinOp op;
      if (punct("=")) op = BinOp::Eq;
      else if (punct("!=")) op = BinOp::Ne;
      else if (punct("<")) op = BinOp::Lt;
      else if (punct("<=")) op = BinOp::Le;
      else if (punct(">")) op = BinOp::Gt;
      else if (punct(">=")) op = BinOp::Ge;
      else break;
      lx_.next();
      e = Expr::bin(op, e, parse_add());
    }
    return e;
  }

  ExprPtr parse_add() {
    ExprPtr e = parse_mul();
    while (punct("+") || punct("-")) {
      BinOp op = punct("+") ? BinOp::Add : BinOp::Sub;
      lx_.next();
      e = Expr::bin(op, e, parse_mul());
    }
    return e;
  }

  ExprPtr parse_mul() {
    ExprPtr e = parse_unary();
    while (punct("*")) {
      lx_.next();
      e = Expr::bin(BinOp::Mul, e, parse_unary());
    }
    return e;
  }

  ExprPtr parse_unary() {
    if (punct("-")) {
      lx_.next();
      return Expr::neg(parse_unary());
    }
    if (punct("!")) {
      lx_.next();
      return Expr::lnot(parse_unary());
    }
    if (punct("(")) {
      lx_.next();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (lx_.peek().kind == Tok::Int) return Expr::constant(lx_.next().value);
    if (lx_.peek().kind == Tok::Ident) {
      Token t = lx_.next();
      bare_uses_.emplace_back(t.text, t);
      return Expr::regref(t.text);
    }
    lx_.fail("expected expression");
  }

  void finish(Program& p) {
    // bare names are registers; bracketed names are shared variables;
    // the two sets must be disjoint
    for (const auto& [name, tok] : bare_uses_) {
      if (bracket_names_.count(name))
        throw ParseError("shared variable '" + name + "' used without brackets (guards and expressions may mention registers only)",
                         tok.line, tok.col);
    }
    for (const auto& [g, tok] : guards_) {
      for (const auto& r : regs_of(g))
        if (bracket_names_.count(r))
          throw ParseError("shared variable '" + r + "' in guard", tok.line, tok.col);
    }
    p.vars = bracket_names_;
    for (auto& [t, cmd] : p.threads) {
      std::set<std::string> rs;
      collect_thread_regs(cmd, rs);
      p.regs[t] = std::move(rs);
    }
    for (const auto& [name, v] : init_entries_) {
      bool is_reg = false;
      for (const auto& [t, rs] : p.regs)
        if (rs.count(name)) is_reg = true;
      if (is_reg && !p.vars.count(name))
        p.init_regs[name] = v;
      else {
        p.init_vars[name] = v;
        p.vars.insert(name);
      }
    }
    for (const auto& v : p.vars)
      if (!p.init_vars.count(v)) p.init_vars[v] = 0;  // uninitialised default
  }

  static void collect_thread_regs(const Command& c, std::set<std::string>& out) {
    switch (c.kind) {
      case Command::Kind::Atom: {
        const Atomic& a = c.atom;
        if (!a.reg.empty()) out.insert(a.reg);
        for (const ExprPtr& e : {a.expr, a.expr2})
          for (const auto& r : regs_of(e)) out.insert(r);
        return;
      }
      case Command::Kind::If:
      case Command::Kind::While:
        for (const auto& r : regs_of(c.guard)) out.insert(r);
        [[fallthrough]];
      case Command::Kind::Seq:
        for (const auto& ch : c.children) collect_thread_regs(ch, out);
        return;
    }
  }
};

Command relabel(const Command& c, const std::string& suffix) {
  Command out = c;
  switch (c.kind) {
    case Command::Kind::Atom:
      if (!out.atom.label.empty()) out.atom.label += suffix;
      return out;
    default:
      out.children.clear();
      for (const auto& ch : c.children) out.children.push_back(relabel(ch, suffix));
      return out;
  }
}

Command unroll_cmd(const Command& c, int depth) {
  switch (c.kind) {
    case Command::Kind::Atom: return c;
    case Command::Kind::Seq:
    case Command::Kind::If: {
      Command out = c;
      out.children.clear();
      for (const auto& ch : c.children) out.children.push_back(unroll_cmd(ch, depth));
      return out;
    }
    case Command::Kind::While: {
      // innermost copy first: iteration k gets suffix ".k"
      Command acc = Command::make_seq({});  // beyond the depth: skip
      for (int k = depth; k >= 1; --k) {
        Command body = relabel(c.children[0], "." + std::to_string(k));
        body = unroll_cmd(body, depth);
        std::vector<Command> seq;
        if (body.kind == Command::Kind::Seq)
          seq = std::move(body.children);
        else
          seq.push_back(std::move(body));
        seq.push_back(std::move(acc));
        Command iter;
        iter.kind = Command::Kind::If;
        iter.guard = c.guard;
        iter.children.push_back(Command::make_seq(std::move(seq)));
        iter.children.push_back(Command::make_seq({}));
        acc = std::move(iter);
      }
      return acc;
    }
  }
  return c;
}

void collect_atoms(const Command& c, std::map<std::string, Atomic>& out) {
  switch (c.kind) {
    case Command::Kind::Atom:
      out[c.atom.label] = c.atom;
      return;
    case Command::Kind::While:
      throw std::logic_error("atomic_set requires a loop-free program");
    default:
      for (const auto& ch : c.children) collect_atoms(ch, out);
      return;
  }
}

bool cmd_has_loop(const Command& c) {
  if (c.kind == Command::Kind::While) return true;
  for (const auto& ch : c.children)
    if (cmd_has_loop(ch)) return true;
  return false;
}

}  // namespace

Program parse_program(const std::string& text) {
  Parser p(text);
  return p.parse();
}

Program unroll(const Program& p, int depth) {
  Program out = p;
  for (auto& [t, cmd] : out.threads) cmd = unroll_cmd(cmd, depth);
  return out;
}

AtomicSet atomic_set(const Program& p) {
  AtomicSet out;
  for (const auto& [t, cmd] : p.threads) {
    std::map<std::string, Atomic> atoms;
    collect_atoms(cmd, atoms);
    out[t] = std::move(atoms);
  }
  return out;
}

std::map<std::string, std::pair<ThreadId, Atomic>> label_index(const Program& p) {
  std::map<std::string, std::pair<ThreadId, Atomic>> out;
  for (const auto& [t, atoms] : atomic_set(p))
    for (const auto& [lab, a] : atoms) out[lab] = {t, a};
  return out;
}

ThreadId Program::reg_owner(const std::string& reg) const {
  ThreadId owner = -1;
  for (const auto& [t, rs] : regs) {
    if (rs.count(reg)) {
      if (owner != -1)
        throw std::runtime_error("register '" + reg + "' is used by threads " +
                                 std::to_string(owner) + " and " + std::to_string(t));
      owner = t;
    }
  }
  if (owner == -1) throw std::runtime_error("register '" + reg + "' is owned by no thread");
  return owner;
}

RegFile Program::initial_regfile(ThreadId t) const {
  RegFile rho;
  auto it = regs.find(t);
  if (it != regs.end())
    for (const auto& r : it->second) {
      auto iv = init_regs.find(r);
      rho[r] = iv == init_regs.end() ? 0 : iv->second;
    }
  return rho;
}

bool Program::has_loops() const {
  for (const auto& [t, cmd] : threads)
    if (cmd_has_loop(cmd)) return true;
  return false;
}

}  // namespace futmc
