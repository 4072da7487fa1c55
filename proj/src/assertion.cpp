#include "futmc/assertion.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace futmc {

namespace {

struct ATok {
  enum class K { End, Int, Ident, Punct } kind = K::End;
  std::string text;
  Val value = 0;
};

class ALexer {
public:
  explicit ALexer(const std::string& s) : src_(s) { advance(); }
  const ATok& peek() const { return tok_; }
  ATok next() {
    ATok t = tok_;
    advance();
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw AssertError("assertion syntax: " + msg + " near '" +
                      (tok_.kind == ATok::K::End ? "<end>" : tok_.text) + "'");
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = ATok{};
    if (pos_ >= src_.size()) return;
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      tok_.kind = ATok::K::Int;
      tok_.text = src_.substr(start, pos_ - start);
      tok_.value = std::stoll(tok_.text);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // a lone '_' is the view subscript marker
      if (c == '_' && !(pos_ + 1 < src_.size() &&
                        (std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])) ||
                         src_[pos_ + 1] == '_'))) {
        tok_.kind = ATok::K::Punct;
        tok_.text = "_";
        ++pos_;
        return;
      }
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '_'))
        ++pos_;
      tok_.kind = ATok::K::Ident;
      tok_.text = src_.substr(start, pos_ - start);
      return;
    }
    static const char* two[] = {"&&", "||", "=>", "!=", "<=", ">=", ".."};
    for (const char* p : two)
      if (src_.compare(pos_, 2, p) == 0) {
        tok_.kind = ATok::K::Punct;
        tok_.text = p;
        pos_ += 2;
        return;
      }
    tok_.kind = ATok::K::Punct;
    tok_.text = std::string(1, c);
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  ATok tok_;
};

class AParser {
public:
  explicit AParser(const std::string& s) : lx_(s) {}

  AssertPtr parse() {
    AssertPtr a = parse_implies();
    if (lx_.peek().kind != ATok::K::End) lx_.fail("unexpected trailing input");
    return a;
  }

private:
  ALexer lx_;

  bool punct(const char* s) { return lx_.peek().kind == ATok::K::Punct && lx_.peek().text == s; }
  bool ident(const char* s) { return lx_.peek().kind == ATok::K::Ident && lx_.peek().text == s; }
  void expect(const char* s) {
    if (!punct(s)) lx_.fail(std::string("expected '") + s + "'");
    lx_.next();
  }

  AssertPtr mk(Assertion a) { return std::make_shared<Assertion>(std::move(a)); }

  AssertPtr parse_implies() {
    AssertPtr l = parse_or();
    if (punct("=>")) {
      lx_.next();
      Assertion a;
      a.kind = Assertion::Kind::Implies;
      a.a = l;
      a.b = parse_implies();  // right associative
      return mk(std::move(a));
    }
    return l;
  }

  AssertPtr parse_or() {
    AssertPtr l = parse_and();
    while (punct("||")) {
      lx_.next();
      Assertion a;
      a.kind = Assertion::Kind::Or;
      a.a = l;
      a.b = parse_and();
      l = mk(std::move(a));
    }
    return l;
  }

  AssertPtr parse_and() {
    AssertPtr l = parse_unary();
    while (punct("&&")) {
      lx_.next();
      Assertion a;
      a.kind = Assertion::Kind::And;
      a.a = l;
      a.b = parse_unary();
      l = mk(std::move(a));
    }
    return l;
  }

  AssertPtr parse_unary() {
    if (ident("forall")) {
      lx_.next();
      if (lx_.peek().kind != ATok::K::Ident) lx_.fail("expected bound variable");
      std::string bound = lx_.next().text;
      if (!ident("in")) lx_.fail("expected 'in'");
      lx_.next();
      SetSpec set = parse_set();
      expect(".");
      Assertion a;
      a.kind = Assertion::Kind::Forall;
      a.bound = std::move(bound);
      a.set = std::move(set);
      a.a = parse_implies();
      return mk(std::move(a));
    }
    if (punct("!")) {
      lx_.next();
      if (punct("[")) {
        Assertion v = parse_view();
        if (v.kind != Assertion::Kind::PossView)
          lx_.fail("'!' before a view applies to a possible view only");
        v.kind = Assertion::Kind::NotPossView;
        return mk(std::move(v));
      }
      Assertion a;
      a.kind = Assertion::Kind::Not;
      a.a = parse_unary();
      return mk(std::move(a));
    }
    return parse_atom();
  }

  AssertPtr parse_atom() {
    if (ident("true")) {
      lx_.next();
      Assertion a;
      a.kind = Assertion::Kind::True;
      return mk(std::move(a));
    }
    if (ident("false")) {
      lx_.next();
      Assertion a;
      a.kind = Assertion::Kind::False;
      return mk(std::move(a));
    }
    if (punct("[")) return mk(parse_view());
    if (punct("(")) {
      // lookahead: either a parenthesised assertion or an integer term
      // disambiguate by trying the assertion first
      std::size_t save_unsupported = 0;
      (void)save_unsupported;
      lx_.next();
      AssertPtr inner = parse_implies();
      expect(")");
      // a comparison may follow only integer terms, not assertions; the
      // grammar keeps these disjoint by construction
      return inner;
    }
    // comparison between integer terms
    AIExprPtr l = parse_iexpr();
    BinOp op;
    if (punct("=")) op = BinOp::Eq;
    else if (punct("!=")) op = BinOp::Ne;
    else if (punct("<")) op = BinOp::Lt;
    else if (punct("<=")) op = BinOp::Le;
    else if (punct(">")) op = BinOp::Gt;
    else if (punct(">=")) op = BinOp::Ge;
    else lx_.fail("expected comparison operator");
    lx_.next();
    AIExprPtr r = parse_iexpr();
    Assertion a;
    a.kind = Assertion::Kind::Cmp;
    a.cmp = op;
    a.lhs = l;
    a.rhs = r;
    return mk(std::move(a));
  }

  Assertion parse_view() {
    expect("[");
    if (lx_.peek().kind != ATok::K::Ident) lx_.fail("expected variable in view");
    std::string var = lx_.next().text;
    Assertion a;
    if (punct("=")) {
      lx_.next();
      a.kind = Assertion::Kind::SyncView;
    } else if (punct("~")) {
      lx_.next();
      a.kind = Assertion::Kind::PossView;
    } else {
      lx_.fail("expected '=' or '~' in view");
    }
    a.var = std::move(var);
    a.vexpr = parse_iexpr();
    expect("]");
    // the subscript lexes as "_" or fused as "_<tid>"
    if (lx_.peek().kind == ATok::K::Ident && lx_.peek().text.size() > 1 &&
        lx_.peek().text[0] == '_') {
      std::string rest = lx_.next().text.substr(1);
      for (char ch : rest)
        if (!std::isdigit(static_cast<unsigned char>(ch))) lx_.fail("expected thread id");
      a.threads.push_back(std::stoi(rest));
      return a;
    }
    expect("_");
    if (punct("{")) {
      lx_.next();
      while (true) {
        if (lx_.peek().kind != ATok::K::Int) lx_.fail("expected thread id");
        a.threads.push_back(static_cast<int>(lx_.next().value));
        if (punct(",")) {
          lx_.next();
          continue;
        }
        break;
      }
      expect("}");
    } else {
      if (lx_.peek().kind != ATok::K::Int) lx_.fail("expected thread id");
      a.threads.push_back(static_cast<int>(lx_.next().value));
    }
    return a;
  }

  SetSpec parse_set() {
    SetSpec s;
    if (ident("domain")) {
      lx_.next();
      expect("(");
      if (lx_.peek().kind != ATok::K::Ident) lx_.fail("expected variable");
      s.kind = SetSpec::Kind::Domain;
      s.var = lx_.next().text;
      expect(")");
      return s;
    }
    if (punct("{")) {
      lx_.next();
      s.kind = SetSpec::Kind::List;
      while (true) {
        s.items.push_back(parse_iexpr());
        if (punct(",")) {
          lx_.next();
          continue;
        }
        break;
      }
      expect("}");
      return s;
    }
    AIExprPtr lo = parse_iexpr();
    if (!punct("..")) lx_.fail("expected '..' in range");
    lx_.next();
    s.kind = SetSpec::Kind::Range;
    s.lo = lo;
    s.hi = parse_iexpr();
    return s;
  }

  AIExprPtr parse_iexpr() { return parse_add(); }

  AIExprPtr parse_add() {
    AIExprPtr l = parse_mul();
    while (punct("+") || punct("-")) {
      BinOp op = punct("+") ? BinOp::Add : BinOp::Sub;
      lx_.next();
      auto e = std::make_shared<AIExpr>();
      e->kind = AIExpr::Kind::Bin;
      e->op = op;
      e->lhs = l;
      e->rhs = parse_mul();
      l = e;
    }
    return l;
  }

  AIExprPtr parse_mul() {
    AIExprPtr l = parse_prim();
    while (punct("*")) {
      lx_.next();
      auto e = std::make_shared<AIExpr>();
      e->kind = AIExpr::Kind::Bin;
      e->op = BinOp::Mul;
      e->lhs = l;
      e->rhs = parse_prim();
      l = e;
    }
    return l;
  }

  AIExprPtr parse_prim() {
    auto e = std::make_shared<AIExpr>();
    if (punct("-")) {
      lx_.next();
      auto sub = std::make_shared<AIExpr>();
      sub->kind = AIExpr::Kind::Bin;
      sub->op = BinOp::Sub;
      auto zero = std::make_shared<AIExpr>();
      zero->kind = AIExpr::Kind::Const;
      zero->value = 0;
      sub->lhs = zero;
      sub->rhs = parse_prim();
      return sub;
    }
    if (punct("(")) {
      lx_.next();
      AIExprPtr inner = parse_iexpr();
      expect(")");
      return inner;
    }
    if (lx_.peek().kind == ATok::K::Int) {
      e->kind = AIExpr::Kind::Const;
      e->value = lx_.next().value;
      return e;
    }
    if (lx_.peek().kind == ATok::K::Ident) {
      std::string name = lx_.next().text;
      if ((name == "maxv" || name == "minv") && punct("(")) {
        lx_.next();
        if (lx_.peek().kind != ATok::K::Ident) lx_.fail("expected variable");
        e->kind = name == "maxv" ? AIExpr::Kind::MaxV : AIExpr::Kind::MinV;
        e->name = lx_.next().text;
        expect(")");
        return e;
      }
      e->kind = AIExpr::Kind::Name;
      e->name = std::move(name);
      return e;
    }
    lx_.fail("expected integer term");
  }
};

}  // namespace

AssertPtr parse_assertion(const std::string& text) {
  AParser p(text);
  return p.parse();
}

// ---------------------------------------------------------------------------
// Evaluation

struct AssertEval::Impl {
  const ExecContext& ctx;
  const Configuration& cfg;
  DerivedRelations d;
  mutable std::map<int, std::set<int>> ow_cache;

  Impl(const ExecContext& c, const Configuration& f) : ctx(c), cfg(f), d(derived(f.sigma)) {}

  const std::set<int>& ow(int tid) const {
    auto it = ow_cache.find(tid);
    if (it == ow_cache.end())
      it = ow_cache.emplace(tid, observable_writes(cfg.sigma, d, tid)).first;
    return it->second;
  }

  void check_thread(int t) const {
    if (!ctx.prog.threads.count(t))
      throw AssertError("assertion mentions unknown thread " + std::to_string(t));
  }

  void check_var(const std::string& v) const {
    if (!ctx.prog.vars.count(v))
      throw AssertError("assertion mentions unknown variable '" + v + "'");
  }

  Val eval_ie(const AIExprPtr& e, const std::map<std::string, Val>& bound) const {
    switch (e->kind) {
      case AIExpr::Kind::Const: return e->value;
      case AIExpr::Kind::Name: {
        auto it = bound.find(e->name);
        if (it != bound.end()) return it->second;
        ThreadId owner = ctx.prog.reg_owner(e->name);  // throws when unowned
        return cfg.gamma.at(owner).at(e->name);
      }
      case AIExpr::Kind::MaxV: {
        check_var(e->name);
        const auto& dom = ctx.dom.at(e->name);
        return *dom.rbegin();
      }
      case AIExpr::Kind::MinV: {
        check_var(e->name);
        const auto& dom = ctx.dom.at(e->name);
        return *dom.begin();
      }
      case AIExpr::Kind::Bin: {
        Val l = eval_ie(e->lhs, bound);
        Val r = eval_ie(e->rhs, bound);
        switch (e->op) {
          case BinOp::Add: return l + r;
          case BinOp::Sub: return l - r;
          case BinOp::Mul: return l * r;
          default: throw AssertError("bad integer operator");
        }
      }
    }
    throw AssertError("bad integer term");
  }

  bool possible_view(const std::string& var, Val v, int t) const {
    for (int w : ow(t))
      if (cfg.sigma.at(w).act.var == var && cfg.sigma.at(w).act.written_value() == v) return true;
    return false;
  }

  bool sync_view(const std::string& var, Val v, int t) const {
    // OW(t)|x must be a singleton of value v
    int count = 0;
    Val seen = 0;
    for (int w : ow(t))
      if (cfg.sigma.at(w).act.var == var) {
        ++count;
        seen = cfg.sigma.at(w).act.written_value();
      }
    return count == 1 && seen == v;
  }

  bool eval(const AssertPtr& a, std::map<std::string, Val>& bound) const {
    switch (a->kind) {
      case Assertion::Kind::True: return true;
      case Assertion::Kind::False: return false;
      case Assertion::Kind::Not: return !eval(a->a, bound);
      case Assertion::Kind::And: return eval(a->a, bound) && eval(a->b, bound);
      case Assertion::Kind::Or: return eval(a->a, bound) || eval(a->b, bound);
      case Assertion::Kind::Implies: return !eval(a->a, bound) || eval(a->b, bound);
      case Assertion::Kind::Cmp: {
        Val l = eval_ie(a->lhs, bound);
        Val r = eval_ie(a->rhs, bound);
        switch (a->cmp) {
          case BinOp::Eq: return l == r;
          case BinOp::Ne: return l != r;
          case BinOp::Lt: return l < r;
          case BinOp::Le: return l <= r;
          case BinOp::Gt: return l > r;
          case BinOp::Ge: return l >= r;
          default: return false;
        }
      }
      case Assertion::Kind::SyncView:
      case Assertion::Kind::PossView:
      case Assertion::Kind::NotPossView: {
        check_var(a->var);
        Val v = eval_ie(a->vexpr, bound);
        for (int t : a->threads) {
          check_thread(t);
          bool ok;
          if (a->kind == Assertion::Kind::SyncView) ok = sync_view(a->var, v, t);
          else if (a->kind == Assertion::Kind::PossView) ok = possible_view(a->var, v, t);
          else ok = !possible_view(a->var, v, t);
          if (!ok) return false;
        }
        return true;
      }
      case Assertion::Kind::Forall: {
        std::vector<Val> values;
        switch (a->set.kind) {
          case SetSpec::Kind::Range: {
            Val lo = eval_ie(a->set.lo, bound);
            Val hi = eval_ie(a->set.hi, bound);
            for (Val v = lo; v <= hi; ++v) values.push_back(v);
            break;
          }
          case SetSpec::Kind::List:
            for (const auto& e : a->set.items) values.push_back(eval_ie(e, bound));
            break;
          case SetSpec::Kind::Domain: {
            check_var(a->set.var);
            for (Val v : ctx.dom.at(a->set.var)) values.push_back(v);
            break;
          }
        }
        for (Val v : values) {
          auto saved = bound.find(a->bound) != bound.end()
                           ? std::optional<Val>(bound[a->bound])
                           : std::nullopt;
          bound[a->bound] = v;
          bool ok = eval(a->a, bound);
          if (saved) bound[a->bound] = *saved;
          else bound.erase(a->bound);
          if (!ok) return false;
        }
        return true;
      }
    }
    throw AssertError("malformed assertion");
  }
};

AssertEval::AssertEval(const ExecContext& ctx, const Configuration& cfg)
    : impl_(std::make_shared<Impl>(ctx, cfg)) {}

bool AssertEval::eval(const AssertPtr& a) const {
  std::map<std::string, Val> bound;
  return impl_->eval(a, bound);
}

bool eval_assertion(const AssertPtr& a, const ExecContext& ctx, const Configuration& cfg) {
  return AssertEval(ctx, cfg).eval(a);
}

// ---------------------------------------------------------------------------

static std::string ie_str(const AIExprPtr& e);

static const char* aop(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    default: return "?";
  }
}

static std::string ie_str(const AIExprPtr& e) {
  switch (e->kind) {
    case AIExpr::Kind::Const: return std::to_string(e->value);
    case AIExpr::Kind::Name: return e->name;
    case AIExpr::Kind::MaxV: return "maxv(" + e->name + ")";
    case AIExpr::Kind::MinV: return "minv(" + e->name + ")";
    case AIExpr::Kind::Bin:
      return "(" + ie_str(e->lhs) + " " + aop(e->op) + " " + ie_str(e->rhs) + ")";
  }
  return "?";
}

std::string Assertion::str() const {
  std::ostringstream os;
  auto tset = [&]() {
    std::ostringstream ts;
    if (threads.size() == 1) ts << threads[0];
    else {
      ts << "{";
      for (std::size_t i = 0; i < threads.size(); ++i)
        ts << (i ? "," : "") << threads[i];
      ts << "}";
    }
    return ts.str();
  };
  switch (kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Cmp: return ie_str(lhs) + " " + aop(cmp) + " " + ie_str(rhs);
    case Kind::SyncView: return "[" + var + " = " + ie_str(vexpr) + "]_" + tset();
    case Kind::PossView: return "[" + var + " ~ " + ie_str(vexpr) + "]_" + tset();
    case Kind::NotPossView: return "![" + var + " ~ " + ie_str(vexpr) + "]_" + tset();
    case Kind::Not: return "!(" + a->str() + ")";
    case Kind::And: return "(" + a->str() + " && " + b->str() + ")";
    case Kind::Or: return "(" + a->str() + " || " + b->str() + ")";
    case Kind::Implies: return "(" + a->str() + " => " + b->str() + ")";
    case Kind::Forall: {
      os << "forall " << bound << " in ";
      switch (set.kind) {
        case SetSpec::Kind::Range: os << ie_str(set.lo) << ".." << ie_str(set.hi); break;
        case SetSpec::Kind::Domain: os << "domain(" << set.var << ")"; break;
        case SetSpec::Kind::List: {
          os << "{";
          for (std::size_t i = 0; i < set.items.size(); ++i)
            os << (i ? "," : "") << ie_str(set.items[i]);
          os << "}";
          break;
        }
      }
      os << ". " << a->str();
      return os.str();
    }
  }
  return "?";
}

}  // namespace futmc
