#ifndef FUTMC_EXECUTOR_HPP
#define FUTMC_EXECUTOR_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "futmc/events.hpp"
#include "futmc/graph.hpp"

namespace futmc {

/// Store -> (W i x n, rho); load -> (R i x n, rho[r:=n]) with n = chosen;
/// reg-assign -> (silent, rho[r:=eval]); update -> (U i x m n, rho).
/// `chosen` must be supplied for loads; for updates it is checked against
/// eval of the expected-value expression when present.
std::pair<Action, RegFile> thread_local_step(const Atomic& cmd, const RegFile& rho,
                                             std::optional<Val> chosen = std::nullopt);

/// Future state of a configuration: event futures by default, label futures
/// when exploring a collapsed set.
struct FutureState {
  std::optional<FutureSet> ev;
  std::optional<std::vector<LabelFuture>> lf;

  static FutureState events(FutureSet fs) {
    FutureState s;
    s.ev = std::move(fs);
    return s;
  }
  static FutureState labels(std::vector<LabelFuture> l);

  bool all_empty() const;
  std::set<std::string> remaining_labels() const;
  /// a ▷ F; nullopt when a is not enabled.
  std::optional<FutureState> candidates(const Action& a) const;
  std::string key() const;
};

/// (⦃Q⦄, (σ, γ), F)
struct Configuration {
  std::map<ThreadId, std::set<std::string>> remaining;
  Graph sigma;
  std::map<ThreadId, RegFile> gamma;
  FutureState fut;
};

/// Everything fixed across one exploration.
struct ExecContext {
  Program prog;  // unrolled
  ValueDomain dom;
  AtomicSet atoms;
  std::map<std::string, std::pair<ThreadId, Atomic>> labels;
  FutureSet initial_futures;
  bool truncated_loops = false;  // a While was cut off at the unroll depth

  // silent commands absent from every future run in program order instead
  std::set<std::string> fallback_silent;
  std::map<ThreadId, std::vector<std::string>> thread_order;
  std::map<std::string, std::vector<ExprPtr>> enclosing_guards;
};

struct RunSpec {
  int unroll_depth = 2;
  ValueDomain domain_seeds;
  std::size_t domain_cap = 64;
  std::optional<std::string> futures_json;  // external futures (file contents)
  std::size_t budget = 1000000;
  int jobs = 1;
  bool label_mode = false;  // drive execution with collapsed label futures
  bool collect_stuck = false;
};

ExecContext prepare(const Program& parsed, const RunSpec& spec);

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Outcome {
  std::map<ThreadId, RegFile> registers;
  std::map<std::string, Val> finals;  // per-variable mo-maximal value
  std::string witness;                // trace file contents reproducing it

  auto key() const { return std::tie(registers, finals); }
  bool operator<(const Outcome& o) const { return key() < o.key(); }
  bool operator==(const Outcome& o) const { return key() == o.key(); }
};

struct Transition {
  int from = -1;
  int to = -1;
  ThreadId tid = 0;
  Action act;
};

struct ExploreResult {
  std::vector<Outcome> outcomes;  // sorted, deduplicated
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::vector<int> terminals;       // state indices
  std::vector<int> stuck;           // non-terminal states without successors
  std::vector<Configuration> arena_configs;   // state index -> configuration
  std::vector<Transition> edges;    // every deduplicated transition
  std::vector<int> parent;          // spanning-tree parent per state
  std::vector<std::string> parent_act;  // trace line into the state ("" for silent)

  std::vector<std::string> trace_to(int state) const;
};

Configuration initial_configuration(const ExecContext& ctx, const RunSpec& spec);

/// All Future-Step successors of a configuration, with the action taken.
struct Successor {
  Configuration cfg;
  ThreadId tid;
  Action act;
  std::optional<int> observed;  // tag of the observed write, memory steps only
};
std::vector<Successor> future_step(const ExecContext& ctx, const Configuration& c);

/// Exhaustive exploration of every reachable configuration. The outcome set
/// is a set union and therefore independent of traversal order and of
/// spec.jobs; exceeding spec.budget raises BudgetError.
ExploreResult explore(const ExecContext& ctx, const RunSpec& spec);

// ---------------------------------------------------------------------------
// Trace replay

struct TracePattern {
  ThreadId tid = 0;
  ActKind kind = ActKind::Read;
  std::string line;
  std::string var;
  std::optional<Val> v1, v2;
  std::optional<Mode> mode;

  bool matches(ThreadId t, const Action& a) const;
};

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One action per line: `t <tid> <kind> <line> <var> [<val> | <rval> <wval>] [mode]`.
/// Omitted values and modes match any action of the same shape.
std::vector<TracePattern> parse_trace(const std::string& text, const ExecContext& ctx);

struct ReplayResult {
  bool accepted = false;
  std::string reason;
};

/// Accepts iff some chain of Future-Step transitions produces the trace's
/// actions in order (silent steps may interleave freely; rf and mo choices
/// are existential).
ReplayResult replay_trace(const ExecContext& ctx, const RunSpec& spec,
                          const std::vector<TracePattern>& trace);

}  // namespace futmc

#endif
