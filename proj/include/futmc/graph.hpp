#ifndef FUTMC_GRAPH_HPP
#define FUTMC_GRAPH_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "futmc/action.hpp"
#include "futmc/program.hpp"
#include "futmc/relation.hpp"

namespace futmc {

/// A tagged action (g, a, t): tag, action, issuing thread (0 = initialiser).
struct TaggedAction {
  int tag = 0;
  int tid = 0;
  Action act;
};

struct StepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tagged action graph (D, sb, rf, mo). Initial writes carry thread id 0
/// and are unordered among themselves; every later event is appended
/// sb-after all same-thread and initialising events. Steps return new
/// graphs; a graph is never mutated after construction.
struct Graph {
  std::vector<TaggedAction> actions;  // indexed by tag
  Rel sb, rf, mo;

  int size() const { return static_cast<int>(actions.size()); }
  int fresh_tag() const { return size(); }
  const TaggedAction& at(int tag) const { return actions.at(tag); }
  bool is_write(int tag) const { return actions.at(tag).act.is_write(); }
  bool is_read(int tag) const { return actions.at(tag).act.is_read(); }
  bool is_update(int tag) const { return actions.at(tag).act.kind == ActKind::Update; }

  std::set<int> writes() const;
  std::set<int> writes_to(const std::string& var) const;
};

/// Initial graph: one write per variable by thread 0; sb, rf, mo all empty.
Graph initial_graph(const std::map<std::string, Val>& init_vars);

/// (D, sb) + e: appends e sb-after all events of tid(e) and of thread 0.
/// The tag must be fresh.
Graph add_event(const Graph& g, const TaggedAction& e);

/// mo[w,b]: b goes immediately after w; everything up to w precedes b,
/// everything after w follows b.
Rel insert_mo(const Rel& mo, int w, int b);

struct DerivedRelations {
  Rel hb;   // (sb ∪ (rf ∩ WrR×RdA))+
  Rel fr;   // (rf⁻¹ ; mo) \ Id
  Rel eco;  // (rf ∪ mo ∪ fr)+
};

DerivedRelations derived(const Graph& g);

/// Encountered writes: writes eco?;hb?-prior to some event of the thread.
std::set<int> encountered_writes(const Graph& g, const DerivedRelations& d, int tid);

/// Observable writes: writes not mo-succeeded by any encountered write.
std::set<int> observable_writes(const Graph& g, const DerivedRelations& d, int tid);

/// Covered writes: writes read by an update.
std::set<int> covered_writes(const Graph& g);

/// Read rule: e reads from w, which must be observable to tid(e) with
/// matching variable and value. rf gains (w,e); mo is unchanged.
Graph step_read(const Graph& g, const TaggedAction& e, int w);

/// Write rule: e is inserted in mo immediately after w, which must be
/// observable to tid(e) and not covered.
Graph step_write(const Graph& g, const TaggedAction& e, int w);

/// RMW rule: e reads from w and goes mo-immediately after it; w must be
/// observable, uncovered, and carry the expected value.
Graph step_rmw(const Graph& g, const TaggedAction& e, int w);

/// Structural invariants, used by the property suites: per-variable mo
/// totality, rf variable/value agreement, hb acyclicity, tag uniqueness,
/// update atomicity.
struct WellformedReport {
  bool ok = true;
  std::vector<std::string> violations;
};
WellformedReport check_wellformed(const Graph& g);

/// Incrementally maintained derived relations; must agree with derived()
/// after every step (checked by the property suites).
class DerivedCache {
public:
  explicit DerivedCache(const Graph& initial);

  const Graph& graph() const { return g_; }
  const DerivedRelations& relations() const { return d_; }

  void apply_read(const TaggedAction& e, int w);
  void apply_write(const TaggedAction& e, int w);
  void apply_rmw(const TaggedAction& e, int w);

private:
  void extend_hb(int e, const std::vector<int>& base_preds);
  void extend_eco(int e, const std::vector<int>& in, const std::vector<int>& out);

  Graph g_;
  DerivedRelations d_;
};

}  // namespace futmc

#endif
