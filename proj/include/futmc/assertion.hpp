#ifndef FUTMC_ASSERTION_HPP
#define FUTMC_ASSERTION_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "futmc/executor.hpp"

namespace futmc {

/// View-based assertion language over configurations (σ, γ):
///   [x = e]_T   synchronised view: every thread in T observes exactly one
///               x-write, of value e
///   [x ~ e]_T   possible view: every thread in T can observe an x-write
///               of value e
///   ![x ~ e]_T  not-possible view, per thread in T
/// plus comparisons over registers (resolved in the owning thread's file),
/// boolean connectives and bounded quantification.
struct Assertion;
using AssertPtr = std::shared_ptr<const Assertion>;

struct AIExpr;
using AIExprPtr = std::shared_ptr<const AIExpr>;

/// Integer terms: constants, registers, bound variables, maxv(x)/minv(x).
struct AIExpr {
  enum class Kind { Const, Name, MaxV, MinV, Bin } kind = Kind::Const;
  Val value = 0;
  std::string name;  // register or bound variable; variable for MaxV/MinV
  BinOp op = BinOp::Add;
  AIExprPtr lhs, rhs;
};

struct SetSpec {
  enum class Kind { Range, List, Domain } kind = Kind::List;
  AIExprPtr lo, hi;              // Range
  std::vector<AIExprPtr> items;  // List
  std::string var;               // Domain
};

struct Assertion {
  enum class Kind {
    True, False, Cmp, SyncView, PossView, NotPossView, Not, And, Or, Implies, Forall
  } kind = Kind::True;

  BinOp cmp = BinOp::Eq;      // Cmp
  AIExprPtr lhs, rhs;         // Cmp
  std::string var;            // views
  AIExprPtr vexpr;            // views
  std::vector<int> threads;   // views
  AssertPtr a, b;             // Not(a), And/Or/Implies(a,b), Forall body in a
  std::string bound;          // Forall
  SetSpec set;                // Forall

  std::string str() const;
};

struct AssertError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Surface syntax: `[x = e]_{1,2}`, `[x ~ e]_2`, `![x ~ e]_2`, `&&`, `||`,
/// `!`, `=>`, comparisons `= != < <= > >=`, `forall i in <set>. A` where
/// <set> is `lo..hi`, `{e,e,...}` or `domain(x)`.
AssertPtr parse_assertion(const std::string& text);

/// Evaluate at a configuration. Registers resolve in the register file of
/// the (statically determined) owning thread. Throws AssertError for
/// unknown variables, threads, or registers owned by no thread.
bool eval_assertion(const AssertPtr& a, const ExecContext& ctx, const Configuration& cfg);

/// Same, with view sets precomputed once for many evaluations at one state.
class AssertEval {
public:
  AssertEval(const ExecContext& ctx, const Configuration& cfg);
  bool eval(const AssertPtr& a) const;

private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

}  // namespace futmc

#endif
