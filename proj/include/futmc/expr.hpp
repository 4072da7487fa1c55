#ifndef FUTMC_EXPR_HPP
#define FUTMC_EXPR_HPP

#include <map>
#include <memory>
#include <set>
#include <string>

#include "futmc/action.hpp"

namespace futmc {

/// Register file rho : Reg -> Val.
using RegFile = std::map<std::string, Val>;

enum class BinOp { Add, Sub, Mul, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expressions over registers and integer constants. Comparisons and the
/// logical operators evaluate to 0/1; guards treat nonzero as true.
struct Expr {
  enum class Kind { Const, Reg, Neg, Not, Bin } kind;
  Val value = 0;        // Const
  std::string reg;      // Reg
  BinOp op = BinOp::Add;
  ExprPtr lhs, rhs;     // Bin (lhs only for Neg/Not)

  static ExprPtr constant(Val v);
  static ExprPtr regref(std::string r);
  static ExprPtr neg(ExprPtr e);
  static ExprPtr lnot(ExprPtr e);
  static ExprPtr bin(BinOp op, ExprPtr l, ExprPtr r);

  std::string str() const;
};

/// Throws EvalError on an unbound register.
Val eval_expr(const Expr& e, const RegFile& rho);
Val eval_expr(const ExprPtr& e, const RegFile& rho);

void collect_regs(const Expr& e, std::set<std::string>& out);
std::set<std::string> regs_of(const ExprPtr& e);

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace futmc

#endif
