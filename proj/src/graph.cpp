#include "futmc/graph.hpp"

#include <algorithm>
#include <sstream>

namespace futmc {

std::set<int> Graph::writes() const {
  std::set<int> out;
  for (const auto& ta : actions)
    if (ta.act.is_write()) out.insert(ta.tag);
  return out;
}

std::set<int> Graph::writes_to(const std::string& var) const {
  std::set<int> out;
  for (const auto& ta : actions)
    if (ta.act.is_write() && ta.act.var == var) out.insert(ta.tag);
  return out;
}

Graph initial_graph(const std::map<std::string, Val>& init_vars) {
  Graph g;
  for (const auto& [var, val] : init_vars) {
    TaggedAction ta;
    ta.tag = g.fresh_tag();
    ta.tid = 0;
    ta.act = Action::write("0", var, val);
    g.actions.push_back(std::move(ta));
  }
  return g;
}

Graph add_event(const Graph& g, const TaggedAction& e) {
  if (e.tag != g.fresh_tag())
    throw StepError("stale or duplicate tag " + std::to_string(e.tag));
  Graph out = g;
  for (const auto& prev : g.actions)
    if (prev.tid == e.tid || prev.tid == 0) out.sb.insert(prev.tag, e.tag);
  out.actions.push_back(e);
  return out;
}

Rel insert_mo(const Rel& mo, int w, int b) {
  Rel out = mo;
  std::set<int> below = mo.preimage(w);  // mo_{⇓w} without w itself
  below.insert(w);
  for (int x : below) out.insert(x, b);
  for (int y : mo.image(w)) out.insert(b, y);
  return out;
}

DerivedRelations derived(const Graph& g) {
  DerivedRelations d;
  Rel hb_base = g.sb;
  for (const auto& [w, r] : g.rf.pairs())
    if (g.at(w).act.releasing() && g.at(r).act.acquiring()) hb_base.insert(w, r);
  d.hb = hb_base.transitive_closure();
  d.fr = g.rf.inverse().compose(g.mo).minus_id();
  d.eco = g.rf.united(g.mo).united(d.fr).transitive_closure();
  return d;
}

std::set<int> encountered_writes(const Graph& g, const DerivedRelations& d, int tid) {
  // (w,e) ∈ eco? ; hb?  ==  w=e or eco or hb or eco;hb
  std::set<int> out;
  for (int w : g.writes()) {
    bool found = false;
    for (const auto& e : g.actions) {
      if (e.tid != tid) continue;
      if (w == e.tag || d.eco.contains(w, e.tag) || d.hb.contains(w, e.tag)) {
        found = true;
        break;
      }
      for (int mid : d.eco.image(w))
        if (d.hb.contains(mid, e.tag)) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (found) out.insert(w);
  }
  return out;
}

std::set<int> observable_writes(const Graph& g, const DerivedRelations& d, int tid) {
  std::set<int> ew = encountered_writes(g, d, tid);
  std::set<int> out;
  for (int w : g.writes()) {
    bool hidden = false;
    for (int w2 : ew)
      if (g.mo.contains(w, w2)) {
        hidden = true;
        break;
      }
    if (!hidden) out.insert(w);
  }
  return out;
}

std::set<int> covered_writes(const Graph& g) {
  std::set<int> out;
  for (const auto& [w, r] : g.rf.pairs())
    if (g.is_update(r)) out.insert(w);
  return out;
}

namespace {

void check_step_common(const Graph& g, const TaggedAction& e, int w) {
  if (e.tag != g.fresh_tag()) throw StepError("stale or duplicate tag");
  if (w < 0 || w >= g.size()) throw StepError("unknown observed write");
  if (!g.is_write(w)) throw StepError("observed event is not a write");
  if (g.at(w).act.var != e.act.var)
    throw StepError("observed write is to variable '" + g.at(w).act.var + "', not '" +
                    e.act.var + "'");
}

}  // namespace

Graph step_read(const Graph& g, const TaggedAction& e, int w) {
  if (e.act.kind != ActKind::Read) throw StepError("step_read requires a read action");
  check_step_common(g, e, w);
  if (g.at(w).act.written_value() != e.act.read_value())
    throw StepError("value mismatch: write stores " +
                    std::to_string(g.at(w).act.written_value()) + ", read expects " +
                    std::to_string(e.act.read_value()));
  DerivedRelations d = derived(g);
  auto ow = observable_writes(g, d, e.tid);
  if (!ow.count(w)) throw StepError("write not observable to thread " + std::to_string(e.tid));
  Graph out = add_event(g, e);
  out.rf.insert(w, e.tag);
  return out;
}

Graph step_write(const Graph& g, const TaggedAction& e, int w) {
  if (e.act.kind != ActKind::Write) throw StepError("step_write requires a write action");
  check_step_common(g, e, w);
  DerivedRelations d = derived(g);
  auto ow = observable_writes(g, d, e.tid);
  if (!ow.count(w)) throw StepError("insertion point not observable to thread " + std::to_string(e.tid));
  if (covered_writes(g).count(w)) throw StepError("insertion point is covered by an update");
  Graph out = add_event(g, e);
  out.mo = insert_mo(g.mo, w, e.tag);
  return out;
}

Graph step_rmw(const Graph& g, const TaggedAction& e, int w) {
  if (e.act.kind != ActKind::Update) throw StepError("step_rmw requires an update action");
  check_step_common(g, e, w);
  if (g.at(w).act.written_value() != e.act.read_value())
    throw StepError("no observable write of expected value " + std::to_string(e.act.read_value()));
  DerivedRelations d = derived(g);
  auto ow = observable_writes(g, d, e.tid);
  if (!ow.count(w)) throw StepError("write not observable to thread " + std::to_string(e.tid));
  if (covered_writes(g).count(w)) throw StepError("write already covered by an update");
  Graph out = add_event(g, e);
  out.rf.insert(w, e.tag);
  out.mo = insert_mo(g.mo, w, e.tag);
  return out;
}

WellformedReport check_wellformed(const Graph& g) {
  WellformedReport rep;
  auto bad = [&](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };

  std::set<int> tags;
  for (const auto& ta : g.actions)
    if (!tags.insert(ta.tag).second) bad("duplicate tag " + std::to_string(ta.tag));

  // rf: write-to-read, same variable, same value
  for (const auto& [w, r] : g.rf.pairs()) {
    if (!g.is_write(w) || !g.is_read(r)) bad("rf edge not write->read");
    else if (g.at(w).act.var != g.at(r).act.var) bad("rf edge across variables");
    else if (g.at(w).act.written_value() != g.at(r).act.read_value())
      bad("rf edge with value disagreement");
  }

  // mo: same-variable, per-variable strict total order
  for (const auto& [a, b] : g.mo.pairs())
    if (!g.is_write(a) || !g.is_write(b) || g.at(a).act.var != g.at(b).act.var)
      bad("mo edge not between same-variable writes");
  std::set<std::string> vars;
  for (const auto& ta : g.actions)
    if (ta.act.is_write()) vars.insert(ta.act.var);
  for (const auto& v : vars) {
    auto ws = g.writes_to(v);
    Rel movx = g.mo.restricted_to(ws);
    if (!movx.acyclic()) bad("mo cyclic on " + v);
    Rel closed = movx.transitive_closure();
    for (int a : ws)
      for (int b : ws)
        if (a != b && !closed.contains(a, b) && !closed.contains(b, a))
          bad("mo not total on " + v);
  }

  DerivedRelations d = derived(g);
  if (!d.hb.irreflexive()) bad("hb cyclic");

  // update atomicity: nothing mo-between an update's source and the update
  for (const auto& [w, u] : g.rf.pairs())
    if (g.is_update(u))
      for (int mid : g.mo.image(w))
        if (g.mo.contains(mid, u)) bad("write mo-between update and its source");

  // the mo-maximal write of each variable is observable to every thread
  std::set<int> tids;
  for (const auto& ta : g.actions) tids.insert(ta.tid);
  for (const auto& v : vars) {
    for (int w : g.writes_to(v)) {
      bool maximal = g.mo.image(w).empty();
      if (!maximal) continue;
      for (int t : tids)
        if (!observable_writes(g, d, t).count(w))
          bad("mo-maximal write of " + v + " not observable to thread " + std::to_string(t));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Incremental derived relations

DerivedCache::DerivedCache(const Graph& initial) : g_(initial), d_(derived(initial)) {}

void DerivedCache::extend_hb(int e, const std::vector<int>& base_preds) {
  // all new hb base edges end at the fresh event e
  std::set<int> preds;
  for (int p : base_preds) {
    preds.insert(p);
    for (int q : d_.hb.preimage(p)) preds.insert(q);
  }
  for (int p : preds) d_.hb.insert(p, e);
}

void DerivedCache::extend_eco(int e, const std::vector<int>& in, const std::vector<int>& out) {
  std::set<int> reach_in;
  for (int a : in) {
    reach_in.insert(a);
    for (int x : d_.eco.preimage(a)) reach_in.insert(x);
  }
  std::set<int> reach_out;
  for (int b : out) {
    reach_out.insert(b);
    for (int y : d_.eco.image(b)) reach_out.insert(y);
  }
  for (int a : reach_in) d_.eco.insert(a, e);
  for (int b : reach_out) d_.eco.insert(e, b);
  for (int a : reach_in)
    for (int b : reach_out) d_.eco.insert(a, b);
}

void DerivedCache::apply_read(const TaggedAction& e, int w) {
  Graph next = step_read(g_, e, w);
  std::vector<int> sb_preds;
  for (const auto& p : g_.actions)
    if (p.tid == e.tid || p.tid == 0) sb_preds.push_back(p.tag);
  std::vector<int> hb_base = sb_preds;
  if (g_.at(w).act.releasing() && e.act.acquiring()) hb_base.push_back(w);
  // eco gains rf (w,e) in, and fr (e,s) out for every mo-successor of w
  std::vector<int> eco_out;
  for (int s : g_.mo.image(w)) eco_out.push_back(s);
  g_ = std::move(next);
  extend_hb(e.tag, hb_base);
  extend_eco(e.tag, {w}, eco_out);
  d_.fr = g_.rf.inverse().compose(g_.mo).minus_id();
}

void DerivedCache::apply_write(const TaggedAction& e, int w) {
  Graph next = step_write(g_, e, w);
  std::vector<int> sb_preds;
  for (const auto& p : g_.actions)
    if (p.tid == e.tid || p.tid == 0) sb_preds.push_back(p.tag);
  // new eco-in edges: mo (p,e) for p up to w, fr (r,e) for readers of those p
  std::vector<int> eco_in;
  std::set<int> below = g_.mo.preimage(w);
  below.insert(w);
  for (int p : below) {
    eco_in.push_back(p);
    for (int r : g_.rf.image(p))
      if (r != e.tag) eco_in.push_back(r);  // fr: r read p, e overwrites
  }
  std::vector<int> eco_out;
  for (int s : g_.mo.image(w)) eco_out.push_back(s);
  g_ = std::move(next);
  extend_hb(e.tag, sb_preds);
  extend_eco(e.tag, eco_in, eco_out);
  // recompute fr exactly: cheap and keeps the cache honest
  d_.fr = g_.rf.inverse().compose(g_.mo).minus_id();
}

void DerivedCache::apply_rmw(const TaggedAction& e, int w) {
  Graph next = step_rmw(g_, e, w);
  std::vector<int> sb_preds;
  for (const auto& p : g_.actions)
    if (p.tid == e.tid || p.tid == 0) sb_preds.push_back(p.tag);
  std::vector<int> hb_base = sb_preds;
  if (g_.at(w).act.releasing() && e.act.acquiring()) hb_base.push_back(w);
  std::vector<int> eco_in;
  std::set<int> below = g_.mo.preimage(w);
  below.insert(w);
  for (int p : below) {
    eco_in.push_back(p);
    for (int r : g_.rf.image(p))
      if (r != e.tag) eco_in.push_back(r);
  }
  std::vector<int> eco_out;
  for (int s : g_.mo.image(w)) eco_out.push_back(s);
  g_ = std::move(next);
  extend_hb(e.tag, hb_base);
  extend_eco(e.tag, eco_in, eco_out);
  d_.fr = g_.rf.inverse().compose(g_.mo).minus_id();
}

}  // namespace futmc
