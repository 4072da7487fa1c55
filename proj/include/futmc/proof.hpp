#ifndef FUTMC_PROOF_HPP
#define FUTMC_PROOF_HPP

#include <map>
#include <string>
#include <vector>

#include "futmc/assertion.hpp"

namespace futmc {

/// A named sub-future of a thread's initial futures: a label future from
/// the outline together with its event-level expansion.
struct NamedSubfuture {
  std::string name;
  LabelFuture shape;
  FutureSet expansion;
  AssertPtr assertion;

  std::set<std::string> lines() const;
};

/// Future predicate I_t: named sub-futures with assertions, plus an
/// optional default for unnamed reachable sub-futures.
struct FuturePredicate {
  ThreadId thread = 0;
  std::vector<NamedSubfuture> named;
  AssertPtr fallback;  // may be null
};

struct ProofOutline {
  AssertPtr pre, post;
  std::map<ThreadId, FuturePredicate> preds;
};

struct OutlineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Outline file:
///   { "pre": str, "post": str,
///     "threads": { "<tid>": { "subfutures": {name: {"labels": [...],
///                                                   "order": [[a,b],...]}},
///                             "assertions": {name: str},
///                             "default": str? } } }
/// Labels are lines, optionally with a read value: "3@1" names line 3
/// reading 1. Every thread needs a name with an empty label set (the
/// post-state predicate I_t(∅)). Each named sub-future must be a
/// sub-future of the thread's initial futures.
ProofOutline load_outline_json(const std::string& text, const ExecContext& ctx);

struct Obligation {
  enum class Kind { Init, PreImpliesInvariant, Post, Local, Global, Coverage };
  enum class Verdict { Pass, Vacuous, Fail };

  Kind kind = Kind::Local;
  Verdict verdict = Verdict::Pass;
  ThreadId t1 = 0, t2 = 0;
  std::string sub1, sub2;  // sub-future names
  std::string command;     // line label
  std::size_t instances = 0;  // instances where the precondition held
  std::string detail;
  std::vector<std::string> counterexample;

  std::string describe() const;
};

struct ObligationReport {
  bool ok = true;
  bool reachability_restricted = true;  // checked over reachable states only
  std::vector<Obligation> obligations;

  std::size_t failed() const;
  std::size_t vacuous() const;
  std::string render_table() const;
  std::string render_json() const;
};

struct HoareResult {
  bool ok = false;
  std::string detail;
  std::vector<std::string> counterexample;
};

/// {X} Init;P {Y}: Init must establish X, and every terminal configuration
/// reachable from the initial one must satisfy Y.
HoareResult check_hoare(const ExecContext& ctx, const RunSpec& spec, const AssertPtr& X,
                        const AssertPtr& Y);

/// Single-step triple {I}_G Q {I'}: from every reachable configuration
/// whose current future of I.thread matches G and satisfies I(G), every
/// step of a command of G re-establishes I' at the successor future.
Obligation check_step_triple(const ExecContext& ctx, const RunSpec& spec,
                             const FuturePredicate& I, const std::string& G,
                             const FuturePredicate& Iprime);

/// Local correctness of one thread: {I}_G Q {I} for every reachable
/// sub-future G of the thread's initial futures.
std::vector<Obligation> check_future_stability(const ExecContext& ctx, const RunSpec& spec,
                                               const FuturePredicate& I);

/// The full Owicki-Gries obligation suite over the reachable state space.
ObligationReport check_og(const ExecContext& ctx, const RunSpec& spec,
                          const ProofOutline& outline);

}  // namespace futmc

#endif
