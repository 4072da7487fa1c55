#ifndef FUTMC_FUTURE_HPP
#define FUTMC_FUTURE_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "futmc/action.hpp"
#include "futmc/relation.hpp"

namespace futmc {

/// Shared labelling of future events: id -> (thread, action).
struct Labeling {
  struct Entry {
    int thread = 0;
    Action act;
  };
  std::map<int, Entry> entries;

  const Entry& at(int id) const;
  bool has(int id) const { return entries.count(id) != 0; }
};
using LabelingPtr = std::shared_ptr<const Labeling>;

/// A future (K, ⪯): a set of pending events with a strict partial order.
/// The order is kept transitively closed; consuming restricts it, so no
/// edges are ever created.
struct Future {
  std::set<int> events;
  Rel order;  // transitive closure, edges within `events`

  bool empty() const { return events.empty(); }
  bool minimal(int g) const;

  bool operator==(const Future& o) const { return events == o.events && order == o.order; }
  bool operator<(const Future& o) const {
    if (events != o.events) return events < o.events;
    return order < o.order;
  }
};

/// A finite set of futures plus the shared labelling.
struct FutureSet {
  std::vector<Future> futures;  // sorted, duplicates merged
  LabelingPtr lab;

  void canonicalize();
  bool empty() const { return futures.empty(); }
  std::size_t size() const { return futures.size(); }

  /// True when every remaining future has an empty event set.
  bool all_empty() const;

  /// Labels (source lines) occurring in any remaining future.
  std::set<std::string> remaining_labels() const;

  bool operator==(const FutureSet& o) const { return futures == o.futures; }
};

/// a is available in f iff some minimal event of f carries label a.
bool available(const Action& a, const Future& f, const Labeling& lab);

/// a ▷ f: removes every event labelled a; order restricted to survivors.
/// Requires available(a, f).
Future consume(const Action& a, const Future& f, const Labeling& lab);

/// a ▷ F: consume from the futures where a is available, discard the rest.
/// a is enabled in F iff the result is nonempty.
FutureSet candidate_futures(const Action& a, const FutureSet& F);

/// F restricted to the events of one thread; duplicates merged.
FutureSet restrict_to_thread(const FutureSet& F, int thread);

/// Every f' in sub must embed as an up-closed subset of some f in sup with
/// matching order (up-closed: kept events keep all their successors).
bool is_subfuture(const FutureSet& sub, const FutureSet& sup);
bool is_subfuture_of(const Future& fsub, const Future& fsup);

// ---------------------------------------------------------------------------
// Label futures (§ label collapsing)

/// An item of a label future: a source line, with the read value attached
/// for read/update events. A missing value matches any event of the line.
struct LabelItem {
  std::string line;
  std::optional<Val> rval;

  auto key() const { return std::make_pair(line, rval); }
  bool operator==(const LabelItem& o) const { return key() == o.key(); }
  bool operator<(const LabelItem& o) const { return key() < o.key(); }
  std::string str() const { return rval ? line + "@" + std::to_string(*rval) : line; }
};

struct LabelFuture {
  std::set<LabelItem> items;
  std::set<std::pair<LabelItem, LabelItem>> order;  // transitive closure

  bool empty() const { return items.empty(); }
  bool operator==(const LabelFuture& o) const { return items == o.items && order == o.order; }
  bool operator<(const LabelFuture& o) const {
    if (items != o.items) return items < o.items;
    return order < o.order;
  }
};

LabelItem label_of(const Action& a);

/// Does the item name this action? Line must agree; a valued item also
/// requires a read of that value.
bool label_item_matches(const LabelItem& item, const Action& a);

struct CollapseResult {
  bool ok = false;
  std::vector<LabelFuture> labels;     // when ok
  std::optional<Future> witness;       // spurious or missing future when !ok
  std::string reason;
};

/// Collapse to label futures; succeeds only when faithful, i.e. expanding
/// the labels regenerates exactly F.
CollapseResult collapse_labels(const FutureSet& F);

/// All event futures over F's labelling that realise `lf`: an injective
/// item -> event assignment whose events are pairwise compatible (co-occur
/// in some future of `universe`) and whose order matches.
std::vector<Future> expand_label_future(const LabelFuture& lf, const FutureSet& universe);

}  // namespace futmc

#endif
