#ifndef FUTMC_EVENTS_HPP
#define FUTMC_EVENTS_HPP

#include <map>
#include <string>
#include <vector>

#include "futmc/domain.hpp"
#include "futmc/future.hpp"
#include "futmc/program.hpp"

namespace futmc {

/// One event of the per-value expansion. Events are shared between the
/// executions of a thread up to the first read they diverge on.
struct Event {
  int id = 0;  // globally unique, deterministic across runs
  ThreadId thread = 0;
  Action act;
};

/// A conflict-free set of events of one thread, in program order, i.e. one
/// complete assignment of values to the thread's loads restricted to the
/// branches those values take.
struct Execution {
  ThreadId thread = 0;
  std::vector<int> events;  // program order
};

struct EventStructure {
  std::map<int, Event> events;
  Rel po;        // program order within executions
  Rel conflict;  // same-thread events that co-occur in no execution
};

struct Expansion {
  EventStructure structure;
  std::map<ThreadId, std::vector<Execution>> executions;
  LabelingPtr labeling() const;
};

struct ExpansionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Expand a loop-free program into per-value events: one read event per
/// (load, domain value), and one execution per complete read-value
/// assignment, containing exactly the events of the branches taken.
Expansion expand_executions(const Program& p, const ValueDomain& dom,
                            std::size_t max_executions_per_thread = 20000);

/// Syntactic dependency of one execution: data edges from the defining
/// event of each register consumed by a store/update/assignment, control
/// edges from the events a guard depends on to the stores, updates and
/// assignments the guard governs, ordering edges between same-variable
/// accesses, and register def/use ordering (a redefinition waits for the
/// previous definition and its uses). Returned transitively closed.
Rel syntactic_dependency(const Execution& exec, const Expansion& exp, const Program& p);

/// Preserved program order from release/acquire annotations: a releasing
/// write orders everything sequenced before it; an acquiring read orders
/// everything sequenced after it. Updates act as both. Transitively closed.
Rel preserved_ppo(const Execution& exec, const Expansion& exp);

/// Initial futures: the cross-thread products of per-thread executions,
/// each ordered by dp ∪ ppo.
FutureSet initial_futures(const Expansion& exp, const Program& p);

}  // namespace futmc

#endif
