#include "futmc/events.hpp"

#include <functional>

namespace futmc {

namespace {

/// Per-thread walk state during expansion. Forks at every load, one branch
/// per domain value; events before the fork stay shared between branches.
struct WalkState {
  RegFile rho;
  std::vector<int> trace;
};

struct ThreadExpander {
  ThreadId tid;
  const ValueDomain& dom;
  EventStructure& es;
  int& next_id;
  std::size_t cap;
  std::vector<Execution> done;

  int emit(WalkState& st, const Action& a) {
    int id = next_id++;
    es.events[id] = Event{id, tid, a};
    st.trace.push_back(id);
    return id;
  }

  void finish(const WalkState& st) {
    if (done.size() >= cap)
      throw ExpansionError("thread " + std::to_string(tid) + " exceeds " +
                           std::to_string(cap) + " executions; restrict value domains");
    done.push_back(Execution{tid, st.trace});
  }

  void walk(const Command& c, WalkState st, const std::function<void(WalkState)>& k) {
    switch (c.kind) {
      case Command::Kind::Atom: {
        const Atomic& a = c.atom;
        switch (a.kind) {
          case AtomKind::Skip:
            k(std::move(st));
            return;
          case AtomKind::Store: {
            Val n = eval_expr(a.expr, st.rho);
            emit(st, Action::write(a.label, a.var, n, a.release));
            k(std::move(st));
            return;
          }
          case AtomKind::Update: {
            Val m = eval_expr(a.expr, st.rho);
            Val n = eval_expr(a.expr2, st.rho);
            emit(st, Action::update(a.label, a.var, m, n));
            k(std::move(st));
            return;
          }
          case AtomKind::RegAssign: {
            Val n = eval_expr(a.expr, st.rho);
            emit(st, Action::silent(a.label));
            st.rho[a.reg] = n;
            k(std::move(st));
            return;
          }
          case AtomKind::Load: {
            auto it = dom.find(a.var);
            if (it == dom.end() || it->second.empty())
              throw ExpansionError("no value domain for variable '" + a.var + "'");
            for (Val v : it->second) {
              WalkState branch = st;
              emit(branch, Action::read(a.label, a.var, v, a.acquire));
              branch.rho[a.reg] = v;
              k(std::move(branch));
            }
            return;
          }
        }
        return;
      }
      case Command::Kind::Seq: {
        walk_seq(c.children, 0, std::move(st), k);
        return;
      }
      case Command::Kind::If: {
        bool taken = eval_expr(c.guard, st.rho) != 0;
        walk(c.children[taken ? 0 : 1], std::move(st), k);
        return;
      }
      case Command::Kind::While:
        throw std::logic_error("expand_executions requires a loop-free program (unroll first)");
    }
  }

  void walk_seq(const std::vector<Command>& cs, std::size_t i, WalkState st,
                const std::function<void(WalkState)>& k) {
    if (i == cs.size()) {
      k(std::move(st));
      return;
    }
    walk(cs[i], std::move(st),
         [this, &cs, i, &k](WalkState st2) { walk_seq(cs, i + 1, std::move(st2), k); });
  }
};

/// Enclosing-conditional paths, for control dependencies. Each If node of a
/// thread gets an index; both branches are governed by its guard.
struct CondIndex {
  std::map<std::string, std::vector<int>> label_conds;  // label -> enclosing If ids
  std::map<int, ExprPtr> guards;

  void build(const Command& c, std::vector<int>& path, int& next) {
    switch (c.kind) {
      case Command::Kind::Atom:
        label_conds[c.atom.label] = path;
        return;
      case Command::Kind::Seq:
        for (const auto& ch : c.children) build(ch, path, next);
        return;
      case Command::Kind::If: {
        int id = next++;
        guards[id] = c.guard;
        path.push_back(id);
        for (const auto& ch : c.children) build(ch, path, next);
        path.pop_back();
        return;
      }
      case Command::Kind::While:
        throw std::logic_error("loop in unrolled program");
    }
  }
};

}  // namespace

Expansion expand_executions(const Program& p, const ValueDomain& dom,
                            std::size_t max_executions_per_thread) {
  Expansion exp;
  int next_id = 1;
  for (const auto& [tid, cmd] : p.threads) {
    ThreadExpander tx{tid, dom, exp.structure, next_id, max_executions_per_thread, {}};
    WalkState st;
    st.rho = p.initial_regfile(tid);
    tx.walk(cmd, std::move(st), [&tx](WalkState fin) { tx.finish(fin); });
    exp.executions[tid] = std::move(tx.done);
  }
  // program order and conflicts
  std::map<std::pair<int, int>, bool> cooccur;
  for (const auto& [tid, execs] : exp.executions)
    for (const auto& e : execs)
      for (std::size_t i = 0; i < e.events.size(); ++i)
        for (std::size_t j = i + 1; j < e.events.size(); ++j) {
          exp.structure.po.insert(e.events[i], e.events[j]);
          cooccur[{e.events[i], e.events[j]}] = true;
          cooccur[{e.events[j], e.events[i]}] = true;
        }
  for (const auto& [idA, evA] : exp.structure.events)
    for (const auto& [idB, evB] : exp.structure.events)
      if (idA < idB && evA.thread == evB.thread && !cooccur.count({idA, idB})) {
        exp.structure.conflict.insert(idA, idB);
        exp.structure.conflict.insert(idB, idA);
      }
  return exp;
}

LabelingPtr Expansion::labeling() const {
  auto lab = std::make_shared<Labeling>();
  for (const auto& [id, ev] : structure.events)
    lab->entries[id] = Labeling::Entry{ev.thread, ev.act};
  return lab;
}

Rel syntactic_dependency(const Execution& exec, const Expansion& exp, const Program& p) {
  auto idx = label_index(p);
  CondIndex conds;
  {
    auto it = p.threads.find(exec.thread);
    if (it == p.threads.end()) throw std::logic_error("unknown thread in execution");
    std::vector<int> path;
    int next = 0;
    conds.build(it->second, path, next);
  }

  Rel dp;
  std::map<std::string, std::set<int>> taint;          // register -> defining event
  std::map<std::string, std::set<int>> reg_users;      // users since the last definition
  std::map<std::string, std::vector<int>> var_events;  // same-variable accesses so far
  std::map<int, std::set<int>> cond_sources;           // If id -> guard source events

  auto guard_sources = [&](int cond_id) -> const std::set<int>& {
    auto it = cond_sources.find(cond_id);
    if (it != cond_sources.end()) return it->second;
    std::set<int> src;
    for (const auto& r : regs_of(conds.guards.at(cond_id)))
      if (taint.count(r)) src.insert(taint[r].begin(), taint[r].end());
    return cond_sources.emplace(cond_id, std::move(src)).first->second;
  };

  for (int id : exec.events) {
    const Event& ev = exp.structure.events.at(id);
    const Atomic& cmd = idx.at(ev.act.line).second;

    // snapshot each guard's sources when its scope is first entered, before
    // anything inside may redefine the guard's registers
    for (int cond_id : conds.label_conds.at(ev.act.line)) guard_sources(cond_id);

    bool consumes_taint = cmd.kind == AtomKind::Store || cmd.kind == AtomKind::Update ||
                          cmd.kind == AtomKind::RegAssign;
    bool control_target = consumes_taint;  // loads may be speculated past a guard

    if (control_target)
      for (int cond_id : conds.label_conds.at(ev.act.line))
        for (int src : guard_sources(cond_id)) dp.insert(src, id);

    std::set<std::string> uses;
    if (consumes_taint) {
      uses = regs_of(cmd.expr);
      if (cmd.kind == AtomKind::Update)
        for (const auto& r : regs_of(cmd.expr2)) uses.insert(r);
      for (const auto& r : uses)
        if (taint.count(r))
          for (int src : taint[r]) dp.insert(src, id);
    }

    if (ev.act.kind != ActKind::Silent) {
      for (int prev : var_events[ev.act.var]) dp.insert(prev, id);
      var_events[ev.act.var].push_back(id);
    }

    // register accesses stay in program order: a redefinition waits for the
    // previous definition and its uses, so thread-local dataflow is the
    // sequential one
    if (cmd.kind == AtomKind::Load || cmd.kind == AtomKind::RegAssign) {
      if (taint.count(cmd.reg))
        for (int src : taint[cmd.reg]) dp.insert(src, id);
      for (int user : reg_users[cmd.reg])
        if (user != id) dp.insert(user, id);
      reg_users[cmd.reg].clear();
      taint[cmd.reg] = {id};
    }
    for (const auto& r : uses) reg_users[r].insert(id);
  }
  return dp.transitive_closure();
}

Rel preserved_ppo(const Execution& exec, const Expansion& exp) {
  Rel ppo;
  const auto& evs = exec.events;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    const Action& a = exp.structure.events.at(evs[i]).act;
    if (a.is_write() && a.releasing())
      for (std::size_t j = 0; j < i; ++j) ppo.insert(evs[j], evs[i]);
    if (a.is_read() && a.acquiring())
      for (std::size_t j = i + 1; j < evs.size(); ++j) ppo.insert(evs[i], evs[j]);
  }
  return ppo.transitive_closure();
}

FutureSet initial_futures(const Expansion& exp, const Program& p) {
  // per-thread parts: (events, dp ∪ ppo)
  struct Part {
    std::set<int> events;
    Rel order;
  };
  std::vector<std::vector<Part>> parts;
  for (const auto& [tid, execs] : exp.executions) {
    std::vector<Part> ps;
    for (const auto& e : execs) {
      Part part;
      part.events.insert(e.events.begin(), e.events.end());
      part.order = syntactic_dependency(e, exp, p).united(preserved_ppo(e, exp)).transitive_closure();
      ps.push_back(std::move(part));
    }
    parts.push_back(std::move(ps));
  }

  FutureSet fs;
  fs.lab = exp.labeling();
  std::vector<std::size_t> pick(parts.size(), 0);
  std::function<void(std::size_t, Future)> rec = [&](std::size_t i, Future acc) {
    if (i == parts.size()) {
      fs.futures.push_back(std::move(acc));
      return;
    }
    for (const auto& part : parts[i]) {
      Future next = acc;
      next.events.insert(part.events.begin(), part.events.end());
      next.order.merge(part.order);
      rec(i + 1, std::move(next));
    }
  };
  rec(0, Future{});
  fs.canonicalize();
  return fs;
}

}  // namespace futmc
