#include "futmc/expr.hpp"

#include <sstream>
#include <stdexcept>

namespace futmc {

ExprPtr Expr::constant(Val v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->value = v;
  return e;
}

ExprPtr Expr::regref(std::string r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Reg;
  e->reg = std::move(r);
  return e;
}

ExprPtr Expr::neg(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Neg;
  e->lhs = std::move(x);
  return e;
}

ExprPtr Expr::lnot(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Not;
  e->lhs = std::move(x);
  return e;
}

ExprPtr Expr::bin(BinOp op, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Bin;
  e->op = op;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

Val eval_expr(const Expr& e, const RegFile& rho) {
  switch (e.kind) {
    case Expr::Kind::Const: return e.value;
    case Expr::Kind::Reg: {
      auto it = rho.find(e.reg);
      if (it == rho.end()) throw EvalError("unbound register: " + e.reg);
      return it->second;
    }
    case Expr::Kind::Neg: return -eval_expr(*e.lhs, rho);
    case Expr::Kind::Not: return eval_expr(*e.lhs, rho) == 0 ? 1 : 0;
    case Expr::Kind::Bin: {
      Val l = eval_expr(*e.lhs, rho);
      Val r = eval_expr(*e.rhs, rho);
      switch (e.op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Eq: return l == r;
        case BinOp::Ne: return l != r;
        case BinOp::Lt: return l < r;
        case BinOp::Le: return l <= r;
        case BinOp::Gt: return l > r;
        case BinOp::Ge: return l >= r;
        case BinOp::And: return (l != 0 && r != 0) ? 1 : 0;
        case BinOp::Or: return (l != 0 || r != 0) ? 1 : 0;
      }
      break;
    }
  }
  throw EvalError("malformed expression");
}

Val eval_expr(const ExprPtr& e, const RegFile& rho) { return eval_expr(*e, rho); }

void collect_regs(const Expr& e, std::set<std::string>& out) {
  switch (e.kind) {
    case Expr::Kind::Const: return;
    case Expr::Kind::Reg: out.insert(e.reg); return;
    case Expr::Kind::Neg:
    case Expr::Kind::Not: collect_regs(*e.lhs, out); return;
    case Expr::Kind::Bin:
      collect_regs(*e.lhs, out);
      collect_regs(*e.rhs, out);
      return;
  }
}

std::set<std::string> regs_of(const ExprPtr& e) {
  std::set<std::string> out;
  if (e) collect_regs(*e, out);
  return out;
}

static const char* op_str(BinOp op) {
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
    case BinOp::And: return "&";
    case BinOp::Or: return "|";
  }
  return "?";
}

std::string Expr::str() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Const: os << value; break;
    case Kind::Reg: os << reg; break;
    case Kind::Neg: os << "-" << lhs->str(); break;
    case Kind::Not: os << "!" << lhs->str(); break;
    case Kind::Bin: os << "(" << lhs->str() << " " << op_str(op) << " " << rhs->str() << ")"; break;
  }
  return os.str();
}

}  // namespace futmc
