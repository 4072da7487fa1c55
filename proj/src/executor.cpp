#include "futmc/executor.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "futmc/json_io.hpp"

namespace futmc {

std::pair<Action, RegFile> thread_local_step(const Atomic& cmd, const RegFile& rho,
                                             std::optional<Val> chosen) {
  switch (cmd.kind) {
    case AtomKind::Store:
      return {Action::write(cmd.label, cmd.var, eval_expr(cmd.expr, rho), cmd.release), rho};
    case AtomKind::Load: {
      if (!chosen) throw std::logic_error("load step requires a chosen value");
      RegFile out = rho;
      out[cmd.reg] = *chosen;
      return {Action::read(cmd.label, cmd.var, *chosen, cmd.acquire), std::move(out)};
    }
    case AtomKind::RegAssign: {
      RegFile out = rho;
      out[cmd.reg] = eval_expr(cmd.expr, rho);
      return {Action::silent(cmd.label), std::move(out)};
    }
    case AtomKind::Update: {
      Val m = eval_expr(cmd.expr, rho);
      Val n = eval_expr(cmd.expr2, rho);
      if (chosen && *chosen != m)
        throw std::logic_error("update expects value " + std::to_string(m));
      return {Action::update(cmd.label, cmd.var, m, n), rho};
    }
    case AtomKind::Skip: return {Action::silent(cmd.label), rho};
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// FutureState

FutureState FutureState::labels(std::vector<LabelFuture> l) {
  FutureState s;
  std::sort(l.begin(), l.end());
  l.erase(std::unique(l.begin(), l.end()), l.end());
  s.lf = std::move(l);
  return s;
}

bool FutureState::all_empty() const {
  if (ev) return ev->all_empty();
  for (const auto& f : *lf)
    if (!f.empty()) return false;
  return true;
}

std::set<std::string> FutureState::remaining_labels() const {
  if (ev) return ev->remaining_labels();
  std::set<std::string> out;
  for (const auto& f : *lf)
    for (const auto& item : f.items) out.insert(item.line);
  return out;
}

namespace {

bool lf_available(const Action& a, const LabelFuture& f) {
  for (const auto& item : f.items) {
    if (!label_item_matches(item, a)) continue;
    bool minimal = true;
    for (const auto& other : f.items)
      if (!(other == item) && f.order.count({other, item})) {
        minimal = false;
        break;
      }
    if (minimal) return true;
  }
  return false;
}

LabelFuture lf_consume(const Action& a, const LabelFuture& f) {
  LabelFuture out;
  for (const auto& item : f.items)
    if (!label_item_matches(item, a)) out.items.insert(item);
  for (const auto& [x, y] : f.order)
    if (out.items.count(x) && out.items.count(y)) out.order.insert({x, y});
  return out;
}

}  // namespace

std::optional<FutureState> FutureState::candidates(const Action& a) const {
  if (ev) {
    FutureSet next = candidate_futures(a, *ev);
    if (next.empty()) return std::nullopt;
    return FutureState::events(std::move(next));
  }
  std::vector<LabelFuture> next;
  for (const auto& f : *lf)
    if (lf_available(a, f)) next.push_back(lf_consume(a, f));
  if (next.empty()) return std::nullopt;
  return FutureState::labels(std::move(next));
}

std::string FutureState::key() const {
  std::ostringstream os;
  if (ev) {
    for (const auto& f : ev->futures) {
      os << "{";
      for (int g : f.events) os << g << ",";
      os << "|";
      for (const auto& [x, y] : f.order.pairs()) os << x << ">" << y << ",";
      os << "}";
    }
  } else {
    for (const auto& f : *lf) {
      os << "{";
      for (const auto& item : f.items) os << item.str() << ",";
      os << "|";
      for (const auto& [x, y] : f.order) os << x.str() << ">" << y.str() << ",";
      os << "}";
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Context preparation

namespace {

void collect_order(const Command& c, std::vector<std::string>& order,
                   std::vector<ExprPtr>& guard_stack,
                   std::map<std::string, std::vector<ExprPtr>>& enclosing) {
  switch (c.kind) {
    case Command::Kind::Atom:
      order.push_back(c.atom.label);
      enclosing[c.atom.label] = guard_stack;
      return;
    case Command::Kind::Seq:
      for (const auto& ch : c.children) collect_order(ch, order, guard_stack, enclosing);
      return;
    case Command::Kind::If:
      guard_stack.push_back(c.guard);
      collect_order(c.children[0], order, guard_stack, enclosing);
      guard_stack.pop_back();
      guard_stack.push_back(Expr::lnot(c.guard));
      collect_order(c.children[1], order, guard_stack, enclosing);
      guard_stack.pop_back();
      return;
    case Command::Kind::While:
      throw std::logic_error("loop survived unrolling");
  }
}

}  // namespace

ExecContext prepare(const Program& parsed, const RunSpec& spec) {
  ExecContext ctx;
  ctx.truncated_loops = parsed.has_loops();
  ctx.prog = unroll(parsed, spec.unroll_depth);
  ctx.dom = value_closure(ctx.prog, spec.domain_seeds, spec.domain_cap);
  ctx.atoms = atomic_set(ctx.prog);
  ctx.labels = label_index(ctx.prog);

  if (spec.futures_json) {
    ctx.initial_futures = load_futures_json(*spec.futures_json, ctx.prog);
  } else {
    Expansion exp = expand_executions(ctx.prog, ctx.dom);
    ctx.initial_futures = initial_futures(exp, ctx.prog);
  }

  std::set<std::string> in_futures;
  for (const auto& [id, e] : ctx.initial_futures.lab->entries) in_futures.insert(e.act.line);
  for (const auto& [lab, ta] : ctx.labels) {
    AtomKind k = ta.second.kind;
    if ((k == AtomKind::RegAssign || k == AtomKind::Skip) && !in_futures.count(lab))
      ctx.fallback_silent.insert(lab);
  }

  for (const auto& [t, cmd] : ctx.prog.threads) {
    std::vector<std::string> order;
    std::vector<ExprPtr> stack;
    collect_order(cmd, order, stack, ctx.enclosing_guards);
    ctx.thread_order[t] = std::move(order);
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Configurations and Future-Step

namespace {

/// Dead-branch pruning plus the program-order fallback for silent commands
/// that have no events: a pending silent command runs (or a dead one
/// disappears) once everything sequenced before it in its thread is done.
void cascade(const ExecContext& ctx, Configuration& c) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::set<std::string> live = c.fut.remaining_labels();
    for (auto& [t, labs] : c.remaining) {
      for (auto it = labs.begin(); it != labs.end();) {
        if (!ctx.fallback_silent.count(*it) && !live.count(*it)) {
          it = labs.erase(it);
          changed = true;
        } else {
          ++it;
        }
      }
    }
    for (auto& [t, labs] : c.remaining) {
      const auto& order = ctx.thread_order.at(t);
      for (const auto& lab : order) {
        if (!labs.count(lab) || !ctx.fallback_silent.count(lab)) continue;
        bool ready = true;
        for (const auto& before : order) {
          if (before == lab) break;
          if (labs.count(before)) {
            ready = false;
            break;
          }
        }
        if (!ready) continue;
        bool taken = true;
        for (const auto& g : ctx.enclosing_guards.at(lab))
          if (eval_expr(g, c.gamma.at(t)) == 0) {
            taken = false;
            break;
          }
        const Atomic& a = ctx.labels.at(lab).second;
        if (taken && a.kind == AtomKind::RegAssign)
          c.gamma[t][a.reg] = eval_expr(a.expr, c.gamma.at(t));
        labs.erase(lab);
        changed = true;
        break;  // re-scan this thread from the start
      }
    }
  }
}

std::string canonical_key(const Configuration& c) {
  std::ostringstream os;
  for (const auto& [t, labs] : c.remaining) {
    os << "T" << t << ":";
    for (const auto& l : labs) os << l << ",";
  }
  os << "|G|";
  // tags renamed to (tid, per-thread index) so interleavings that built the
  // same graph coincide
  std::map<int, std::pair<int, int>> canon;
  std::map<int, int> next_idx;
  for (const auto& ta : c.sigma.actions) canon[ta.tag] = {ta.tid, next_idx[ta.tid]++};
  auto cid = [&](int tag) {
    auto [t, i] = canon.at(tag);
    return std::to_string(t) + "." + std::to_string(i);
  };
  for (const auto& ta : c.sigma.actions)
    os << cid(ta.tag) << "=" << ta.act.str() << ";";
  std::set<std::string> rfpairs, mopairs;
  for (const auto& [a, b] : c.sigma.rf.pairs()) rfpairs.insert(cid(a) + ">" + cid(b));
  for (const auto& [a, b] : c.sigma.mo.pairs()) mopairs.insert(cid(a) + ">" + cid(b));
  os << "|rf|";
  for (const auto& s : rfpairs) os << s << ",";
  os << "|mo|";
  for (const auto& s : mopairs) os << s << ",";
  os << "|g|";
  for (const auto& [t, rho] : c.gamma) {
    os << t << ":";
    for (const auto& [r, v] : rho) os << r << "=" << v << ",";
  }
  os << "|F|" << c.fut.key();
  return os.str();
}

}  // namespace

Configuration initial_configuration(const ExecContext& ctx, const RunSpec& spec) {
  Configuration c;
  c.sigma = initial_graph(ctx.prog.init_vars);
  for (const auto& [t, cmd] : ctx.prog.threads) c.gamma[t] = ctx.prog.initial_regfile(t);
  for (const auto& [t, atoms] : ctx.atoms) {
    auto& labs = c.remaining[t];
    for (const auto& [lab, a] : atoms) labs.insert(lab);
  }
  if (spec.label_mode) {
    CollapseResult col = collapse_labels(ctx.initial_futures);
    if (!col.ok)
      throw std::runtime_error("initial futures are not label-collapsible: " + col.reason);
    c.fut = FutureState::labels(std::move(col.labels));
  } else {
    c.fut = FutureState::events(ctx.initial_futures);
  }
  cascade(ctx, c);
  return c;
}

std::vector<Successor> future_step(const ExecContext& ctx, const Configuration& c) {
  std::vector<Successor> out;
  if (c.fut.all_empty()) return out;

  DerivedRelations d = derived(c.sigma);
  std::set<int> cw = covered_writes(c.sigma);

  auto push = [&](ThreadId t, const std::string& lab, const Action& act, FutureState fut,
                  std::optional<Graph> sigma, RegFile gamma_t, std::optional<int> w) {
    Successor s;
    s.tid = t;
    s.act = act;
    s.observed = w;
    s.cfg.remaining = c.remaining;
    s.cfg.remaining[t].erase(lab);
    s.cfg.sigma = sigma ? std::move(*sigma) : c.sigma;
    s.cfg.gamma = c.gamma;
    s.cfg.gamma[t] = std::move(gamma_t);
    s.cfg.fut = std::move(fut);
    cascade(ctx, s.cfg);
    out.push_back(std::move(s));
  };

  for (const auto& [t, labs] : c.remaining) {
    std::set<int> ow = observable_writes(c.sigma, d, t);
    for (const auto& lab : labs) {
      const Atomic& cmd = ctx.labels.at(lab).second;
      const RegFile& rho = c.gamma.at(t);
      switch (cmd.kind) {
        case AtomKind::Skip:
          break;  // handled by the cascade
        case AtomKind::RegAssign: {
          if (ctx.fallback_silent.count(lab)) break;
          auto [act, rho2] = thread_local_step(cmd, rho);
          if (auto fut = c.fut.candidates(act))
            push(t, lab, act, std::move(*fut), std::nullopt, std::move(rho2), std::nullopt);
          break;
        }
        case AtomKind::Store: {
          auto [act, rho2] = thread_local_step(cmd, rho);
          auto fut = c.fut.candidates(act);
          if (!fut) break;
          for (int w : ow) {
            if (cw.count(w) || c.sigma.at(w).act.var != cmd.var) continue;
            TaggedAction e{c.sigma.fresh_tag(), t, act};
            push(t, lab, act, *fut, step_write(c.sigma, e, w), rho2, w);
          }
          break;
        }
        case AtomKind::Load: {
          for (int w : ow) {
            if (c.sigma.at(w).act.var != cmd.var) continue;
            Val v = c.sigma.at(w).act.written_value();
            auto [act, rho2] = thread_local_step(cmd, rho, v);
            auto fut = c.fut.candidates(act);
            if (!fut) continue;
            TaggedAction e{c.sigma.fresh_tag(), t, act};
            push(t, lab, act, std::move(*fut), step_read(c.sigma, e, w), std::move(rho2), w);
          }
          break;
        }
        case AtomKind::Update: {
          auto [act, rho2] = thread_local_step(cmd, rho);
          auto fut = c.fut.candidates(act);
          if (!fut) break;
          for (int w : ow) {
            if (cw.count(w) || c.sigma.at(w).act.var != cmd.var) continue;
            if (c.sigma.at(w).act.written_value() != act.read_value()) continue;
            TaggedAction e{c.sigma.fresh_tag(), t, act};
            push(t, lab, act, *fut, step_rmw(c.sigma, e, w), rho2, w);
          }
          break;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exhaustive exploration

namespace {

std::string trace_line(ThreadId t, const Action& a) {
  if (a.kind == ActKind::Silent) return "";
  return "t " + std::to_string(t) + " " + a.str();
}

Outcome make_outcome(const ExecContext& ctx, const Configuration& c) {
  Outcome o;
  o.registers = c.gamma;
  for (const auto& v : ctx.prog.vars) {
    Val best = 0;
    for (int w : c.sigma.writes_to(v))
      if (c.sigma.mo.image(w).empty()) best = c.sigma.at(w).act.written_value();
    o.finals[v] = best;
  }
  return o;
}

}  // namespace

std::vector<std::string> ExploreResult::trace_to(int state) const {
  std::vector<std::string> lines;
  for (int s = state; s >= 0 && parent[s] >= 0; s = parent[s])
    if (!parent_act[s].empty()) lines.push_back(parent_act[s]);
  std::reverse(lines.begin(), lines.end());
  return lines;
}

ExploreResult explore(const ExecContext& ctx, const RunSpec& spec) {
  ExploreResult res;
  std::mutex mu;
  std::condition_variable cv;
  std::deque<int> work;
  std::unordered_map<std::string, int> visited;
  int active = 0;
  bool overflow = false;
  std::exception_ptr failure;

  auto okey = [](const Outcome& o) { return std::make_pair(o.registers, o.finals); };
  std::map<std::pair<std::map<ThreadId, RegFile>, std::map<std::string, Val>>, std::string>
      best_witness;

  {
    Configuration init = initial_configuration(ctx, spec);
    std::string key = canonical_key(init);
    visited.emplace(std::move(key), 0);
    res.arena_configs.push_back(std::move(init));
    res.parent.push_back(-1);
    res.parent_act.emplace_back("");
    work.push_back(0);
  }

  auto process = [&](int idx) {
    Configuration cfg;
    {
      std::lock_guard<std::mutex> lk(mu);
      cfg = res.arena_configs[idx];
    }
    std::vector<Successor> succs = future_step(ctx, cfg);
    std::lock_guard<std::mutex> lk(mu);
    if (cfg.fut.all_empty()) {
      res.terminals.push_back(idx);
      Outcome o = make_outcome(ctx, cfg);
      auto lines = res.trace_to(idx);
      std::string w;
      for (const auto& l : lines) w += l + "\n";
      auto it = best_witness.find(okey(o));
      if (it == best_witness.end() || w < it->second) best_witness[okey(o)] = w;
      return;
    }
    if (succs.empty()) {
      if (spec.collect_stuck) res.stuck.push_back(idx);
      return;
    }
    for (auto& s : succs) {
      std::string key = canonical_key(s.cfg);
      auto [it, fresh] = visited.emplace(std::move(key), static_cast<int>(res.arena_configs.size()));
      int to = it->second;
      if (fresh) {
        if (visited.size() > spec.budget) {
          overflow = true;
          return;
        }
        res.arena_configs.push_back(std::move(s.cfg));
        res.parent.push_back(idx);
        res.parent_act.push_back(trace_line(s.tid, s.act));
        work.push_back(to);
        cv.notify_one();
      }
      res.edges.push_back(Transition{idx, to, s.tid, s.act});
    }
  };

  auto worker = [&] {
    std::unique_lock<std::mutex> lk(mu);
    while (true) {
      cv.wait(lk, [&] { return !work.empty() || (work.empty() && active == 0) || overflow || failure; });
      if (overflow || failure) return;
      if (work.empty()) {
        cv.notify_all();
        return;
      }
      int idx = work.front();
      work.pop_front();
      ++active;
      lk.unlock();
      try {
        process(idx);
      } catch (...) {
        std::lock_guard<std::mutex> g(mu);
        failure = std::current_exception();
      }
      lk.lock();
      --active;
      if ((work.empty() && active == 0) || overflow || failure) cv.notify_all();
    }
  };

  int jobs = std::max(1, spec.jobs);
  if (jobs == 1) {
    // deterministic single-threaded loop, no synchronisation subtleties
    while (!work.empty() && !overflow) {
      int idx = work.front();
      work.pop_front();
      process(idx);
    }
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  if (overflow)
    throw BudgetError("state budget of " + std::to_string(spec.budget) + " configurations exceeded");

  res.states = visited.size();
  res.transitions = res.edges.size();

  std::set<Outcome> outs;
  for (int t : res.terminals) {
    Outcome o = make_outcome(ctx, res.arena_configs[t]);
    o.witness = best_witness[okey(o)];
    outs.insert(std::move(o));
  }
  res.outcomes.assign(outs.begin(), outs.end());
  return res;
}

// ---------------------------------------------------------------------------
// Trace replay

bool TracePattern::matches(ThreadId t, const Action& a) const {
  if (t != tid || a.kind != kind || a.line != line) return false;
  if (!var.empty() && a.var != var) return false;
  if (mode && a.mode != *mode) return false;
  switch (kind) {
    case ActKind::Read: return !v1 || a.rval == *v1;
    case ActKind::Write: return !v1 || a.wval == *v1;
    case ActKind::Update:
      return (!v1 || a.rval == *v1) && (!v2 || a.wval == *v2);
    default: return true;
  }
}

std::vector<TracePattern> parse_trace(const std::string& text, const ExecContext& ctx) {
  std::vector<TracePattern> out;
  std::istringstream in(text);
  std::string row;
  int lineno = 0;
  while (std::getline(in, row)) {
    ++lineno;
    auto hash = row.find('#');
    if (hash != std::string::npos) row.erase(hash);
    std::istringstream ls(row);
    std::vector<std::string> tok;
    std::string w;
    while (ls >> w) tok.push_back(w);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw TraceError("trace line " + std::to_string(lineno) + ": " + msg);
    };
    if (tok[0] != "t" || tok.size() < 4) fail("expected `t <tid> <kind> <line> ...`");
    TracePattern p;
    try {
      p.tid = std::stoi(tok[1]);
    } catch (...) {
      fail("bad thread id '" + tok[1] + "'");
    }
    if (tok[2] == "R") p.kind = ActKind::Read;
    else if (tok[2] == "W") p.kind = ActKind::Write;
    else if (tok[2] == "U") p.kind = ActKind::Update;
    else fail("unknown action kind '" + tok[2] + "'");
    p.line = tok[3];
    auto it = ctx.labels.find(p.line);
    if (it == ctx.labels.end()) fail("unknown label '" + p.line + "'");
    std::size_t i = 4;
    if (i < tok.size() && !std::isdigit(static_cast<unsigned char>(tok[i][0])) &&
        tok[i] != "rlx" && tok[i] != "rel" && tok[i] != "acq" && tok[i] != "ra") {
      p.var = tok[i++];
    }
    auto is_int = [](const std::string& s) {
      if (s.empty()) return false;
      std::size_t k = s[0] == '-' ? 1 : 0;
      if (k == s.size()) return false;
      for (; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) return false;
      return true;
    };
    if (i < tok.size() && is_int(tok[i])) p.v1 = std::stoll(tok[i++]);
    if (i < tok.size() && is_int(tok[i])) p.v2 = std::stoll(tok[i++]);
    if (i < tok.size()) {
      if (tok[i] == "rlx") p.mode = Mode::Rlx;
      else if (tok[i] == "rel") p.mode = Mode::Rel;
      else if (tok[i] == "acq") p.mode = Mode::Acq;
      else if (tok[i] == "ra") p.mode = Mode::RelAcq;
      else fail("unknown mode '" + tok[i] + "'");
      ++i;
    }
    if (i < tok.size()) fail("trailing tokens");
    out.push_back(std::move(p));
  }
  return out;
}

ReplayResult replay_trace(const ExecContext& ctx, const RunSpec& spec,
                          const std::vector<TracePattern>& trace) {
  Configuration init = initial_configuration(ctx, spec);
  std::set<std::pair<std::size_t, std::string>> seen;
  std::function<bool(const Configuration&, std::size_t)> dfs =
      [&](const Configuration& c, std::size_t idx) -> bool {
    if (idx == trace.size()) return true;
    auto key = std::make_pair(idx, canonical_key(c));
    if (!seen.insert(key).second) return false;
    for (const auto& s : future_step(ctx, c)) {
      if (s.act.kind == ActKind::Silent) {
        if (dfs(s.cfg, idx)) return true;
      } else if (trace[idx].matches(s.tid, s.act)) {
        if (dfs(s.cfg, idx + 1)) return true;
      }
    }
    return false;
  };
  ReplayResult r;
  r.accepted = dfs(init, 0);
  if (!r.accepted) r.reason = "no execution produces the trace's actions in order";
  return r;
}

}  // namespace futmc
