#include "futmc/future.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace futmc {

const Labeling::Entry& Labeling::at(int id) const {
  auto it = entries.find(id);
  if (it == entries.end())
    throw std::runtime_error("future references unlabelled event " + std::to_string(id));
  return it->second;
}

bool Future::minimal(int g) const {
  for (int g2 : events)
    if (g2 != g && order.contains(g2, g)) return false;
  return true;
}

void FutureSet::canonicalize() {
  std::sort(futures.begin(), futures.end());
  futures.erase(std::unique(futures.begin(), futures.end()), futures.end());
}

bool FutureSet::all_empty() const {
  for (const auto& f : futures)
    if (!f.empty()) return false;
  return true;
}

std::set<std::string> FutureSet::remaining_labels() const {
  std::set<std::string> out;
  for (const auto& f : futures)
    for (int g : f.events) out.insert(lab->at(g).act.line);
  return out;
}

bool available(const Action& a, const Future& f, const Labeling& lab) {
  for (int g : f.events)
    if (lab.at(g).act == a && f.minimal(g)) return true;
  return false;
}

Future consume(const Action& a, const Future& f, const Labeling& lab) {
  if (!available(a, f, lab)) throw std::logic_error("consume: action not available");
  Future out;
  for (int g : f.events)
    if (!(lab.at(g).act == a)) out.events.insert(g);
  out.order = f.order.restricted_to(out.events);
  return out;
}

FutureSet candidate_futures(const Action& a, const FutureSet& F) {
  FutureSet out;
  out.lab = F.lab;
  for (const auto& f : F.futures)
    if (available(a, f, *F.lab)) out.futures.push_back(consume(a, f, *F.lab));
  out.canonicalize();
  return out;
}

FutureSet restrict_to_thread(const FutureSet& F, int thread) {
  FutureSet out;
  out.lab = F.lab;
  for (const auto& f : F.futures) {
    Future r;
    for (int g : f.events)
      if (F.lab->at(g).thread == thread) r.events.insert(g);
    r.order = f.order.restricted_to(r.events);
    out.futures.push_back(std::move(r));
  }
  out.canonicalize();
  return out;
}

bool is_subfuture_of(const Future& fsub, const Future& fsup) {
  for (int g : fsub.events)
    if (!fsup.events.count(g)) return false;
  // up-closed: a kept event keeps all its successors
  for (int g : fsub.events)
    for (int h : fsup.events)
      if (!fsub.events.count(h) && fsup.order.contains(g, h)) return false;
  return fsup.order.restricted_to(fsub.events) == fsub.order;
}

bool is_subfuture(const FutureSet& sub, const FutureSet& sup) {
  for (const auto& fs : sub.futures) {
    bool found = false;
    for (const auto& f : sup.futures)
      if (is_subfuture_of(fs, f)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

LabelItem label_of(const Action& a) {
  LabelItem item;
  item.line = a.line;
  if (a.is_read()) item.rval = a.read_value();
  return item;
}

static LabelFuture collapse_one(const Future& f, const Labeling& lab) {
  LabelFuture lf;
  for (int g : f.events) lf.items.insert(label_of(lab.at(g).act));
  for (const auto& [x, y] : f.order.pairs())
    lf.order.insert({label_of(lab.at(x).act), label_of(lab.at(y).act)});
  return lf;
}

bool label_item_matches(const LabelItem& item, const Action& a) {
  if (item.line != a.line) return false;
  if (item.rval && !(a.is_read() && a.read_value() == *item.rval)) return false;
  return true;
}

std::vector<Future> expand_label_future(const LabelFuture& lf, const FutureSet& universe) {
  const Labeling& lab = *universe.lab;
  std::vector<LabelItem> items(lf.items.begin(), lf.items.end());
  std::vector<std::vector<int>> cands(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    for (const auto& [id, e] : lab.entries)
      if (label_item_matches(items[i], e.act)) cands[i].push_back(id);

  // pairwise compatibility: events must co-occur in some future of the universe
  auto compatible = [&](int a, int b) {
    for (const auto& f : universe.futures)
      if (f.events.count(a) && f.events.count(b)) return true;
    return false;
  };

  std::vector<Future> out;
  std::vector<int> pick(items.size(), -1);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == items.size()) {
      Future f;
      for (int id : pick) f.events.insert(id);
      if (f.events.size() != items.size()) return;  // injective
      // order must match item-for-item
      for (std::size_t x = 0; x < items.size(); ++x)
        for (std::size_t y = 0; y < items.size(); ++y) {
          if (x == y) continue;
          bool want = lf.order.count({items[x], items[y]}) != 0;
          if (want) f.order.insert(pick[x], pick[y]);
        }
      // verify no extra order required: the future's order is exactly the image
      out.push_back(std::move(f));
      return;
    }
    for (int id : cands[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        if (pick[j] == id || !compatible(pick[j], id)) ok = false;
      if (!ok) continue;
      pick[i] = id;
      rec(i + 1);
      pick[i] = -1;
    }
  };
  rec(0);
  return out;
}

CollapseResult collapse_labels(const FutureSet& F) {
  CollapseResult res;
  std::set<LabelFuture> labels;
  for (const auto& f : F.futures) {
    LabelFuture lf = collapse_one(f, *F.lab);
    if (lf.items.size() != f.events.size()) {
      res.ok = false;
      res.witness = f;
      res.reason = "two events of one future collapse to the same label item";
      return res;
    }
    labels.insert(std::move(lf));
  }
  // faithfulness: expanding the labels regenerates exactly F
  std::set<Future> expanded;
  for (const auto& lf : labels)
    for (auto& f : expand_label_future(lf, F)) expanded.insert(std::move(f));
  std::set<Future> original(F.futures.begin(), F.futures.end());
  for (const auto& f : expanded)
    if (!original.count(f)) {
      res.ok = false;
      res.witness = f;
      res.reason = "label futures describe a future the set does not contain";
      return res;
    }
  for (const auto& f : original)
    if (!expanded.count(f)) {
      res.ok = false;
      res.witness = f;
      res.reason = "label futures fail to describe a future of the set";
      return res;
    }
  res.ok = true;
  res.labels.assign(labels.begin(), labels.end());
  return res;
}

}  // namespace futmc
