#include "futmc/domain.hpp"

#include <functional>

namespace futmc {

namespace {

using ValSet = std::set<Val>;
using AbsEnv = std::map<std::string, ValSet>;

constexpr std::size_t kEvalCap = 4096;

ValSet eval_set(const Expr& e, const AbsEnv& env) {
  switch (e.kind) {
    case Expr::Kind::Const: return {e.value};
    case Expr::Kind::Reg: {
      auto it = env.find(e.reg);
      if (it == env.end()) return {0};
      return it->second;
    }
    case Expr::Kind::Neg: {
      ValSet out;
      for (Val v : eval_set(*e.lhs, env)) out.insert(-v);
      return out;
    }
    case Expr::Kind::Not: {
      ValSet out;
      for (Val v : eval_set(*e.lhs, env)) out.insert(v == 0 ? 1 : 0);
      return out;
    }
    case Expr::Kind::Bin: {
      ValSet ls = eval_set(*e.lhs, env);
      ValSet rs = eval_set(*e.rhs, env);
      ValSet out;
      for (Val l : ls)
        for (Val r : rs) {
          Val v;
          switch (e.op) {
            case BinOp::Add: v = l + r; break;
            case BinOp::Sub: v = l - r; break;
            case BinOp::Mul: v = l * r; break;
            case BinOp::Eq: v = l == r; break;
            case BinOp::Ne: v = l != r; break;
            case BinOp::Lt: v = l < r; break;
            case BinOp::Le: v = l <= r; break;
            case BinOp::Gt: v = l > r; break;
            case BinOp::Ge: v = l >= r; break;
            case BinOp::And: v = (l != 0 && r != 0); break;
            case BinOp::Or: v = (l != 0 || r != 0); break;
            default: v = 0; break;
          }
          out.insert(v);
          if (out.size() > kEvalCap) throw DomainError("expression value set diverges");
        }
      return out;
    }
  }
  return {};
}

struct Closure {
  const Program& p;
  const ValueDomain& seeds;
  std::size_t cap;
  ValueDomain dom;
  bool changed = false;

  void add(const std::string& var, Val v) {
    if (seeds.count(var)) return;  // pinned
    auto& s = dom[var];
    if (s.insert(v).second) {
      changed = true;
      if (s.size() > cap)
        throw DomainError("value domain of '" + var + "' exceeds " + std::to_string(cap) +
                          " values; seed it explicitly (e.g. --domain " + var + "=lo..hi)");
    }
  }

  void walk(const Command& c, AbsEnv& env) {
    switch (c.kind) {
      case Command::Kind::Atom: {
        const Atomic& a = c.atom;
        switch (a.kind) {
          case AtomKind::Skip: return;
          case AtomKind::Load: env[a.reg] = dom[a.var]; return;
          case AtomKind::RegAssign: env[a.reg] = eval_set(*a.expr, env); return;
          case AtomKind::Store:
            for (Val v : eval_set(*a.expr, env)) add(a.var, v);
            return;
          case AtomKind::Update:
            for (Val v : eval_set(*a.expr2, env)) add(a.var, v);
            return;
        }
        return;
      }
      case Command::Kind::Seq:
        for (const auto& ch : c.children) walk(ch, env);
        return;
      case Command::Kind::If: {
        AbsEnv then_env = env;
        AbsEnv else_env = env;
        walk(c.children[0], then_env);
        walk(c.children[1], else_env);
        env = std::move(then_env);
        for (auto& [r, vs] : else_env) env[r].insert(vs.begin(), vs.end());
        return;
      }
      case Command::Kind::While:
        throw std::logic_error("value_closure requires a loop-free program (unroll first)");
    }
  }
};

}  // namespace

ValueDomain value_closure(const Program& p, const ValueDomain& seeds, std::size_t cap) {
  Closure cl{p, seeds, cap, {}, false};
  for (const auto& v : p.vars) {
    Val init = p.init_vars.count(v) ? p.init_vars.at(v) : 0;
    if (seeds.count(v)) {
      const auto& s = seeds.at(v);
      if (!s.count(init))
        throw DomainError("seed domain of '" + v + "' must contain its initial value " +
                          std::to_string(init));
      cl.dom[v] = s;
    } else {
      cl.dom[v] = {0, init};
    }
  }
  do {
    cl.changed = false;
    for (const auto& [t, cmd] : p.threads) {
      AbsEnv env;
      for (const auto& r : p.regs.at(t)) {
        auto it = p.init_regs.find(r);
        env[r] = {it == p.init_regs.end() ? 0 : it->second};
      }
      cl.walk(cmd, env);
    }
  } while (cl.changed);
  return cl.dom;
}

}  // namespace futmc
