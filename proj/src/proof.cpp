#include "futmc/proof.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace futmc {

using nlohmann::json;

std::set<std::string> NamedSubfuture::lines() const {
  std::set<std::string> out;
  for (const auto& item : shape.items) out.insert(item.line);
  return out;
}

// ---------------------------------------------------------------------------
// Outline loading

namespace {

LabelItem parse_label_item(const std::string& s) {
  LabelItem item;
  auto at = s.find('@');
  if (at == std::string::npos) {
    item.line = s;
  } else {
    item.line = s.substr(0, at);
    item.rval = std::stoll(s.substr(at + 1));
  }
  return item;
}

}  // namespace

ProofOutline load_outline_json(const std::string& text, const ExecContext& ctx) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw OutlineError(std::string("malformed outline: ") + e.what());
  }
  if (!doc.contains("pre") || !doc.contains("post") || !doc.contains("threads"))
    throw OutlineError("outline needs 'pre', 'post' and 'threads'");

  ProofOutline out;
  try {
    out.pre = parse_assertion(doc["pre"].get<std::string>());
    out.post = parse_assertion(doc["post"].get<std::string>());
  } catch (const AssertError& e) {
    throw OutlineError(e.what());
  }

  for (const auto& [tstr, body] : doc["threads"].items()) {
    ThreadId t = std::stoi(tstr);
    if (!ctx.prog.threads.count(t))
      throw OutlineError("outline mentions unknown thread " + tstr);
    FuturePredicate pred;
    pred.thread = t;
    FutureSet universe = restrict_to_thread(ctx.initial_futures, t);

    if (!body.contains("subfutures") || !body.contains("assertions"))
      throw OutlineError("thread " + tstr + " needs 'subfutures' and 'assertions'");
    bool has_empty = false;
    auto parse_shape = [&](const json& jsf, const std::string& name) {
      LabelFuture shape;
      for (const auto& l : jsf.at("labels")) shape.items.insert(parse_label_item(l.get<std::string>()));
      if (jsf.contains("order"))
        for (const auto& e : jsf.at("order")) {
          LabelItem a = parse_label_item(e.at(0).get<std::string>());
          LabelItem b = parse_label_item(e.at(1).get<std::string>());
          if (!shape.items.count(a) || !shape.items.count(b))
            throw OutlineError("order edge outside labels in sub-future '" + name + "'");
          shape.order.insert({a, b});
        }
      bool grew = true;
      while (grew) {
        grew = false;
        for (const auto& [a, b] : shape.order)
          for (const auto& [c, d] : shape.order)
            if (b == c && !shape.order.count({a, d})) {
              shape.order.insert({a, d});
              grew = true;
            }
      }
      return shape;
    };
    for (const auto& [name, jsf] : body["subfutures"].items()) {
      NamedSubfuture n;
      n.name = name;
      // one shape, or several under "futures" when branches give a thread
      // sub-futures of different shapes
      std::vector<LabelFuture> shapes;
      if (jsf.contains("futures")) {
        for (const auto& js : jsf.at("futures")) shapes.push_back(parse_shape(js, name));
      } else {
        shapes.push_back(parse_shape(jsf, name));
      }
      n.shape = shapes.front();
      n.expansion.lab = universe.lab;
      bool all_empty_labels = true;
      for (const auto& shape : shapes) {
        if (!shape.items.empty()) all_empty_labels = false;
        for (auto& f : expand_label_future(shape, universe)) {
          // only up-closed restrictions of initial futures are reachable
          bool valid = false;
          for (const auto& init : universe.futures)
            if (is_subfuture_of(f, init)) {
              valid = true;
              break;
            }
          if (valid) n.expansion.futures.push_back(std::move(f));
        }
      }
      n.expansion.canonicalize();
      for (const auto& shape : shapes)
        for (const auto& item : shape.items) n.shape.items.insert(item);
      if (all_empty_labels) has_empty = true;
      else if (n.expansion.empty())
        throw OutlineError("sub-future '" + name + "' of thread " + tstr +
                           " matches no reachable sub-future of the initial futures");
      if (!body["assertions"].contains(name))
        throw OutlineError("sub-future '" + name + "' of thread " + tstr + " has no assertion");
      try {
        n.assertion = parse_assertion(body["assertions"][name].get<std::string>());
      } catch (const AssertError& e) {
        throw OutlineError(std::string("assertion '") + name + "': " + e.what());
      }
      pred.named.push_back(std::move(n));
    }
    if (!has_empty)
      throw OutlineError("thread " + tstr + " needs a sub-future with an empty label set");
    if (body.contains("default"))
      pred.fallback = parse_assertion(body["default"].get<std::string>());
    out.preds[t] = std::move(pred);
  }
  for (const auto& [t, cmd] : ctx.prog.threads)
    if (!out.preds.count(t))
      throw OutlineError("outline misses thread " + std::to_string(t));
  return out;
}

// ---------------------------------------------------------------------------
// The reachability engine shared by the checks

namespace {

struct Engine {
  const ExecContext& ctx;
  ExploreResult res;
  mutable std::map<int, std::shared_ptr<AssertEval>> evals;
  mutable std::map<std::pair<int, ThreadId>, FutureSet> restrictions;

  Engine(const ExecContext& c, RunSpec spec) : ctx(c) {
    spec.jobs = 1;  // deterministic transition enumeration
    spec.label_mode = false;
    res = explore(ctx, spec);
  }

  const AssertEval& eval_at(int s) const {
    auto it = evals.find(s);
    if (it == evals.end())
      it = evals.emplace(s, std::make_shared<AssertEval>(ctx, res.arena_configs[s])).first;
    return *it->second;
  }

  const FutureSet& restriction(int s, ThreadId t) const {
    auto key = std::make_pair(s, t);
    auto it = restrictions.find(key);
    if (it == restrictions.end()) {
      const auto& fut = res.arena_configs[s].fut;
      if (!fut.ev) throw std::logic_error("proof checking requires event futures");
      it = restrictions.emplace(key, restrict_to_thread(*fut.ev, t)).first;
    }
    return it->second;
  }

  /// Names of I whose expansion contains every future of the thread's
  /// current sub-future.
  std::vector<const NamedSubfuture*> matched(int s, const FuturePredicate& I) const {
    const FutureSet& g = restriction(s, I.thread);
    std::vector<const NamedSubfuture*> out;
    for (const auto& n : I.named) {
      bool all = true;
      for (const auto& f : g.futures) {
        if (!std::binary_search(n.expansion.futures.begin(), n.expansion.futures.end(), f)) {
          all = false;
          break;
        }
      }
      if (all) out.push_back(&n);
    }
    return out;
  }

  struct Resolution {
    bool covered = true;
    bool holds = true;
    std::vector<const NamedSubfuture*> names;
  };

  Resolution resolve(int s, const FuturePredicate& I) const {
    Resolution r;
    r.names = matched(s, I);
    const AssertEval& ev = eval_at(s);
    if (r.names.empty()) {
      if (I.fallback) r.holds = ev.eval(I.fallback);
      else {
        r.covered = false;
        r.holds = false;
      }
      return r;
    }
    for (const auto* n : r.names)
      if (!ev.eval(n->assertion)) {
        r.holds = false;
        break;
      }
    return r;
  }

  std::vector<std::string> counterexample(int pre_state, const Transition* step,
                                          const std::string& note) const {
    std::vector<std::string> out = res.trace_to(pre_state);
    if (step) {
      std::string s = "step: thread " + std::to_string(step->tid) + " " + step->act.str();
      out.push_back(s);
    }
    out.push_back(note);
    return out;
  }
};

std::string names_str(const std::vector<const NamedSubfuture*>& ns) {
  if (ns.empty()) return "(default)";
  std::string s;
  for (const auto* n : ns) s += (s.empty() ? "" : "+") + n->name;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hoare triples

HoareResult check_hoare(const ExecContext& ctx, const RunSpec& spec, const AssertPtr& X,
                        const AssertPtr& Y) {
  Engine eng(ctx, spec);
  HoareResult r;
  if (!eng.eval_at(0).eval(X)) {
    r.ok = false;
    r.detail = "initialisation does not establish the precondition";
    return r;
  }
  for (int t : eng.res.terminals) {
    if (!eng.eval_at(t).eval(Y)) {
      r.ok = false;
      r.detail = "terminal configuration violates the postcondition";
      r.counterexample = eng.res.trace_to(t);
      return r;
    }
  }
  r.ok = true;
  std::ostringstream os;
  os << "holds over " << eng.res.terminals.size() << " terminal / " << eng.res.states
     << " reachable configurations";
  r.detail = os.str();
  return r;
}

// ---------------------------------------------------------------------------
// Obligation suites

namespace {

struct Bucket {
  Obligation ob;
  bool failed = false;
};

using BucketMap = std::map<std::string, Bucket>;

Bucket& bucket(BucketMap& m, Obligation proto, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) {
    proto.verdict = Obligation::Verdict::Vacuous;
    it = m.emplace(key, Bucket{std::move(proto), false}).first;
  }
  return it->second;
}

void record_pass(Bucket& b) {
  b.ob.instances++;
  if (!b.failed && b.ob.verdict == Obligation::Verdict::Vacuous)
    b.ob.verdict = Obligation::Verdict::Pass;
}

void record_fail(Bucket& b, const std::vector<std::string>& cex, const std::string& detail) {
  b.ob.instances++;
  if (!b.failed) {
    b.failed = true;
    b.ob.verdict = Obligation::Verdict::Fail;
    b.ob.counterexample = cex;
    b.ob.detail = detail;
  }
}

/// Local-correctness buckets of one thread over the whole transition list.
void local_obligations(const Engine& eng, const FuturePredicate& I, BucketMap& buckets,
                       std::vector<Obligation>& coverage) {
  // pre-create one bucket per (named sub-future, command) so unreachable
  // annotations surface as vacuous
  for (const auto& n : I.named)
    for (const auto& line : n.lines()) {
      Obligation proto;
      proto.kind = Obligation::Kind::Local;
      proto.t1 = I.thread;
      proto.sub1 = n.name;
      proto.command = line;
      bucket(buckets, proto, "local/" + std::to_string(I.thread) + "/" + n.name + "/" + line);
    }
  std::set<std::string> uncovered_seen;
  for (const auto& e : eng.res.edges) {
    if (e.tid != I.thread) continue;
    Engine::Resolution pre = eng.resolve(e.from, I);
    if (!pre.covered) {
      if (uncovered_seen.insert(std::to_string(e.from)).second) {
        Obligation ob;
        ob.kind = Obligation::Kind::Coverage;
        ob.t1 = I.thread;
        ob.verdict = Obligation::Verdict::Fail;
        ob.detail = "reachable sub-future of thread " + std::to_string(I.thread) +
                    " matches no named sub-future and no default is given";
        ob.counterexample = eng.counterexample(e.from, nullptr, ob.detail);
        coverage.push_back(std::move(ob));
      }
      continue;
    }
    if (!pre.holds) continue;
    Engine::Resolution post = eng.resolve(e.to, I);
    bool ok = post.covered && post.holds;
    for (const auto* n : pre.names) {
      Bucket& b = bucket(buckets,
                         Obligation{Obligation::Kind::Local, Obligation::Verdict::Vacuous,
                                    I.thread, 0, n->name, "", e.act.line, 0, "", {}},
                         "local/" + std::to_string(I.thread) + "/" + n->name + "/" + e.act.line);
      if (ok) record_pass(b);
      else
        record_fail(b,
                    eng.counterexample(e.from, &e,
                                       post.covered
                                           ? "invariant " + names_str(post.names) +
                                                 " of thread " + std::to_string(I.thread) +
                                                 " fails after the step"
                                           : "successor sub-future is not covered"),
                    "local correctness violated");
    }
    if (pre.names.empty()) {
      Bucket& b = bucket(buckets,
                         Obligation{Obligation::Kind::Local, Obligation::Verdict::Vacuous,
                                    I.thread, 0, "(default)", "", e.act.line, 0, "", {}},
                         "local/" + std::to_string(I.thread) + "/(default)/" + e.act.line);
      if (ok) record_pass(b);
      else record_fail(b, eng.counterexample(e.from, &e, "default invariant fails after the step"),
                       "local correctness violated");
    }
  }
}

}  // namespace

std::vector<Obligation> check_future_stability(const ExecContext& ctx, const RunSpec& spec,
                                               const FuturePredicate& I) {
  Engine eng(ctx, spec);
  BucketMap buckets;
  std::vector<Obligation> coverage;
  local_obligations(eng, I, buckets, coverage);
  std::vector<Obligation> out;
  for (auto& [k, b] : buckets) out.push_back(std::move(b.ob));
  for (auto& ob : coverage) out.push_back(std::move(ob));
  return out;
}

Obligation check_step_triple(const ExecContext& ctx, const RunSpec& spec,
                             const FuturePredicate& I, const std::string& G,
                             const FuturePredicate& Iprime) {
  const NamedSubfuture* named = nullptr;
  for (const auto& n : I.named)
    if (n.name == G) named = &n;
  if (!named) throw OutlineError("unknown sub-future '" + G + "'");

  Engine eng(ctx, spec);
  Obligation ob;
  ob.kind = Obligation::Kind::Local;
  ob.t1 = I.thread;
  ob.sub1 = G;
  ob.verdict = Obligation::Verdict::Vacuous;
  const AssertPtr& pre_assert = named->assertion;

  for (const auto& e : eng.res.edges) {
    if (e.tid != I.thread) continue;
    auto pre_names = eng.matched(e.from, I);
    if (std::find(pre_names.begin(), pre_names.end(), named) == pre_names.end()) continue;
    if (!eng.eval_at(e.from).eval(pre_assert)) continue;
    Engine::Resolution post = eng.resolve(e.to, Iprime);
    ob.instances++;
    if (post.covered && post.holds) {
      if (ob.verdict == Obligation::Verdict::Vacuous) ob.verdict = Obligation::Verdict::Pass;
    } else if (ob.verdict != Obligation::Verdict::Fail) {
      ob.verdict = Obligation::Verdict::Fail;
      ob.detail = "postcondition predicate fails after the step";
      ob.counterexample = eng.counterexample(e.from, &e, ob.detail);
    }
  }
  if (ob.verdict == Obligation::Verdict::Vacuous)
    ob.detail = "no reachable configuration satisfies the precondition at '" + G + "'";
  return ob;
}

ObligationReport check_og(const ExecContext& ctx, const RunSpec& spec,
                          const ProofOutline& outline) {
  Engine eng(ctx, spec);
  ObligationReport rep;

  // (1) Init => X
  {
    Obligation ob;
    ob.kind = Obligation::Kind::Init;
    ob.instances = 1;
    if (eng.eval_at(0).eval(outline.pre)) ob.verdict = Obligation::Verdict::Pass;
    else {
      ob.verdict = Obligation::Verdict::Fail;
      ob.detail = "initial configuration violates the precondition";
      ob.counterexample = {ob.detail};
    }
    rep.obligations.push_back(std::move(ob));
  }

  // (2) X => I_t(F_mu|t) at the initial configuration
  bool pre_holds_at_init = eng.eval_at(0).eval(outline.pre);
  for (const auto& [t, I] : outline.preds) {
    Obligation ob;
    ob.kind = Obligation::Kind::PreImpliesInvariant;
    ob.t1 = t;
    if (!pre_holds_at_init) {
      ob.verdict = Obligation::Verdict::Vacuous;
      ob.detail = "precondition does not hold initially";
    } else {
      Engine::Resolution r = eng.resolve(0, I);
      ob.instances = 1;
      ob.sub1 = names_str(r.names);
      if (r.covered && r.holds) ob.verdict = Obligation::Verdict::Pass;
      else {
        ob.verdict = Obligation::Verdict::Fail;
        ob.detail = r.covered ? "invariant fails at the initial future"
                              : "initial sub-future matches no named sub-future";
        ob.counterexample = {ob.detail};
      }
    }
    rep.obligations.push_back(std::move(ob));
  }

  // (3) (forall t. I_t(∅)) => Y at every reachable terminal
  {
    Obligation ob;
    ob.kind = Obligation::Kind::Post;
    ob.verdict = Obligation::Verdict::Vacuous;
    for (int s : eng.res.terminals) {
      bool all_hold = true;
      for (const auto& [t, I] : outline.preds) {
        Engine::Resolution r = eng.resolve(s, I);
        if (!r.covered || !r.holds) {
          all_hold = false;
          break;
        }
      }
      if (!all_hold) continue;
      ob.instances++;
      if (eng.eval_at(s).eval(outline.post)) {
        if (ob.verdict == Obligation::Verdict::Vacuous) ob.verdict = Obligation::Verdict::Pass;
      } else if (ob.verdict != Obligation::Verdict::Fail) {
        ob.verdict = Obligation::Verdict::Fail;
        ob.detail = "thread invariants at ∅ do not force the postcondition";
        ob.counterexample = eng.counterexample(s, nullptr, ob.detail);
      }
    }
    rep.obligations.push_back(std::move(ob));
  }

  // (4) local correctness
  std::vector<Obligation> coverage;
  for (const auto& [t, I] : outline.preds) {
    BucketMap buckets;
    local_obligations(eng, I, buckets, coverage);
    for (auto& [k, b] : buckets) rep.obligations.push_back(std::move(b.ob));
  }

  // (5) global correctness: I_t1 at its current sub-future is stable under
  // every step of every other thread
  for (const auto& [t1, I1] : outline.preds) {
    BucketMap buckets;
    for (const auto& [t2, I2] : outline.preds) {
      if (t1 == t2) continue;
      for (const auto& n1 : I1.named)
        for (const auto& n2 : I2.named)
          for (const auto& line : n2.lines()) {
            Obligation proto;
            proto.kind = Obligation::Kind::Global;
            proto.t1 = t1;
            proto.sub1 = n1.name;
            proto.t2 = t2;
            proto.sub2 = n2.name;
            proto.command = line;
            bucket(buckets, proto,
                   "global/" + std::to_string(t1) + "/" + n1.name + "/" + std::to_string(t2) +
                       "/" + n2.name + "/" + line);
          }
    }
    for (const auto& e : eng.res.edges) {
      if (e.tid == t1) continue;
      auto it2 = outline.preds.find(e.tid);
      if (it2 == outline.preds.end()) continue;
      const FuturePredicate& I2 = it2->second;
      Engine::Resolution r1 = eng.resolve(e.from, I1);
      Engine::Resolution r2 = eng.resolve(e.from, I2);
      if (!r1.covered || !r2.covered || !r1.holds || !r2.holds) continue;
      // I_t1 stays fixed at its pre-state sub-future during t2's step
      bool ok = true;
      const AssertEval& post_eval = eng.eval_at(e.to);
      if (r1.names.empty()) ok = post_eval.eval(I1.fallback);
      else
        for (const auto* n : r1.names)
          if (!post_eval.eval(n->assertion)) {
            ok = false;
            break;
          }
      auto mark = [&](const NamedSubfuture* n1, const NamedSubfuture* n2) {
        std::string k1 = n1 ? n1->name : "(default)";
        std::string k2 = n2 ? n2->name : "(default)";
        Bucket& b = bucket(buckets,
                           Obligation{Obligation::Kind::Global, Obligation::Verdict::Vacuous,
                                      t1, e.tid, k1, k2, e.act.line, 0, "", {}},
                           "global/" + std::to_string(t1) + "/" + k1 + "/" +
                               std::to_string(e.tid) + "/" + k2 + "/" + e.act.line);
        if (ok) record_pass(b);
        else
          record_fail(b,
                      eng.counterexample(e.from, &e,
                                         "thread " + std::to_string(t1) + " invariant " + k1 +
                                             " broken by thread " + std::to_string(e.tid)),
                      "interference freedom violated");
      };
      if (r1.names.empty() && r2.names.empty()) mark(nullptr, nullptr);
      else if (r1.names.empty())
        for (const auto* n2 : r2.names) mark(nullptr, n2);
      else if (r2.names.empty())
        for (const auto* n1 : r1.names) mark(n1, nullptr);
      else
        for (const auto* n1 : r1.names)
          for (const auto* n2 : r2.names) mark(n1, n2);
    }
    for (auto& [k, b] : buckets) rep.obligations.push_back(std::move(b.ob));
  }

  for (auto& ob : coverage) rep.obligations.push_back(std::move(ob));

  rep.ok = true;
  for (const auto& ob : rep.obligations)
    if (ob.verdict == Obligation::Verdict::Fail) rep.ok = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Report rendering

std::string Obligation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Init: os << "init => pre"; break;
    case Kind::PreImpliesInvariant: os << "pre => I_" << t1 << "(initial)"; break;
    case Kind::Post: os << "I(∅) => post"; break;
    case Kind::Local: os << "local t" << t1 << " {" << sub1 << "} " << command; break;
    case Kind::Global:
      os << "global t" << t1 << " {" << sub1 << "} under t" << t2 << " {" << sub2 << "} "
         << command;
      break;
    case Kind::Coverage: os << "coverage t" << t1; break;
  }
  return os.str();
}

std::size_t ObligationReport::failed() const {
  std::size_t n = 0;
  for (const auto& ob : obligations)
    if (ob.verdict == Obligation::Verdict::Fail) ++n;
  return n;
}

std::size_t ObligationReport::vacuous() const {
  std::size_t n = 0;
  for (const auto& ob : obligations)
    if (ob.verdict == Obligation::Verdict::Vacuous) ++n;
  return n;
}

std::string ObligationReport::render_table() const {
  std::ostringstream os;
  for (const auto& ob : obligations) {
    const char* v = ob.verdict == Obligation::Verdict::Pass      ? "PASS"
                    : ob.verdict == Obligation::Verdict::Vacuous ? "VAC "
                                                                 : "FAIL";
    os << "[" << v << "] " << ob.describe();
    if (ob.instances) os << "  (" << ob.instances << " instance" << (ob.instances == 1 ? "" : "s") << ")";
    if (!ob.detail.empty()) os << "  -- " << ob.detail;
    os << "\n";
    if (ob.verdict == Obligation::Verdict::Fail)
      for (const auto& line : ob.counterexample) os << "    " << line << "\n";
  }
  os << (ok ? "VALID" : "INVALID") << " (reachability-restricted): " << obligations.size()
     << " obligations, " << failed() << " failed, " << vacuous() << " vacuous\n";
  return os.str();
}

std::string ObligationReport::render_json() const {
  json arr = json::array();
  for (const auto& ob : obligations) {
    json o;
    o["obligation"] = ob.describe();
    o["verdict"] = ob.verdict == Obligation::Verdict::Pass      ? "pass"
                   : ob.verdict == Obligation::Verdict::Vacuous ? "vacuous"
                                                                : "fail";
    o["instances"] = ob.instances;
    if (!ob.detail.empty()) o["detail"] = ob.detail;
    if (!ob.counterexample.empty()) o["counterexample"] = ob.counterexample;
    arr.push_back(o);
  }
  json doc{{"obligations", arr},
           {"reachability_restricted", reachability_restricted},
           {"valid", ok}};
  return doc.dump(2) + "\n";
}

}  // namespace futmc
