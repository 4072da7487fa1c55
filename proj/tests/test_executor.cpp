#include <doctest.h>

#include "futmc/json_io.hpp"
#include "test_util.hpp"

using namespace futmc;
using namespace futmc::testutil;

namespace {

ExecContext ctx_for(const char* name, RunSpec spec = {}) {
  return make_ctx(slurp(std::string("litmus/") + name), spec);
}

}  // namespace

TEST_CASE("thread_local_step") {
  Atomic store;
  store.kind = AtomKind::Store;
  store.label = "2";
  store.var = "y";
  store.expr = Expr::bin(BinOp::Add, Expr::regref("r1"), Expr::constant(1));
  auto [act1, rho1] = thread_local_step(store, RegFile{{"r1", 1}});
  CHECK(act1 == Action::write("2", "y", 2));
  CHECK(rho1.at("r1") == 1);

  Atomic load;
  load.kind = AtomKind::Load;
  load.label = "1";
  load.var = "x";
  load.reg = "r1";
  auto [act2, rho2] = thread_local_step(load, RegFile{{"r1", 0}}, 1);
  CHECK(act2 == Action::read("1", "x", 1));
  CHECK(rho2.at("r1") == 1);

  Atomic assign;
  assign.kind = AtomKind::RegAssign;
  assign.label = "3";
  assign.reg = "r2";
  assign.expr = Expr::constant(5);
  auto [act3, rho3] = thread_local_step(assign, RegFile{{"r2", 0}});
  CHECK(act3.kind == ActKind::Silent);
  CHECK(rho3.at("r2") == 5);
}

TEST_CASE("future_step: initial load-buffering configuration") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  Configuration init = initial_configuration(ctx, spec);
  auto succs = future_step(ctx, init);

  // line 2's events all wait on line 1, so no successor runs line 2
  for (const auto& s : succs) CHECK(s.act.line != "2");
  // line 4 is steppable
  bool line4 = false;
  for (const auto& s : succs)
    if (s.act == Action::write("4", "x", 1)) line4 = true;
  CHECK(line4);
  // line 1 reads 0 from the initial write; line 3 likewise
  bool line1 = false;
  for (const auto& s : succs)
    if (s.act == Action::read("1", "x", 0)) line1 = true;
  CHECK(line1);
  for (const auto& s : succs)
    if (s.act.kind == ActKind::Read) CHECK(s.act.rval == 0);
}

TEST_CASE("future_step: terminal configuration has no successors") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  ExploreResult res = explore(ctx, spec);
  REQUIRE(!res.terminals.empty());
  for (int t : res.terminals) {
    CHECK(res.arena_configs[t].fut.all_empty());
    CHECK(future_step(ctx, res.arena_configs[t]).empty());
  }
}

TEST_CASE("explore: two-dependency variant has the unique all-zero outcome") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb_two_deps.lit", spec);
  ExploreResult res = explore(ctx, spec);
  REQUIRE(res.outcomes.size() == 1);
  CHECK(res.outcomes[0].registers.at(1).at("r1") == 0);
  CHECK(res.outcomes[0].registers.at(2).at("r2") == 0);
  CHECK(res.outcomes[0].finals.at("x") == 0);
  CHECK(res.outcomes[0].finals.at("y") == 0);
}

TEST_CASE("explore: load buffering reaches exactly the four relaxed outcomes") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  ExploreResult res = explore(ctx, spec);
  CHECK(reg_pairs(res, "r1", "r2") ==
        std::set<std::pair<Val, Val>>{{0, 0}, {0, 1}, {1, 0}, {1, 2}});
}

TEST_CASE("explore: without dependencies the (1,1) outcome appears") {
  RunSpec spec;
  ExecContext ctx = ctx_for("no_dep.lit", spec);
  ExploreResult res = explore(ctx, spec);
  auto pairs = reg_pairs(res, "r1", "r2");
  CHECK(pairs.count({1, 1}));
  CHECK(pairs == std::set<std::pair<Val, Val>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("explore: every terminal graph is wellformed and fully read") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  ExploreResult res = explore(ctx, spec);
  for (int t : res.terminals) {
    const Graph& g = res.arena_configs[t].sigma;
    CHECK(check_wellformed(g).ok);
    for (const auto& ta : g.actions)
      if (ta.act.is_read()) CHECK(g.rf.preimage(ta.tag).size() == 1);
  }
}

TEST_CASE("explore: outcome set is worker-count independent") {
  RunSpec one;
  one.jobs = 1;
  RunSpec four;
  four.jobs = 4;
  ExecContext ctx = ctx_for("lb.lit", one);
  ExploreResult a = explore(ctx, one);
  ExploreResult b = explore(ctx, four);
  CHECK(a.outcomes == b.outcomes);
  CHECK(a.states == b.states);
}

TEST_CASE("explore: state budget is a hard error") {
  RunSpec spec;
  spec.budget = 3;
  ExecContext ctx = ctx_for("lb.lit", spec);
  CHECK_THROWS_AS(explore(ctx, spec), BudgetError);
}

TEST_CASE("explore: external futures reproduce the built-in outcomes") {
  RunSpec builtin;
  ExecContext ctx1 = ctx_for("lb.lit", builtin);
  ExploreResult r1 = explore(ctx1, builtin);

  RunSpec external;
  external.futures_json = slurp("tests/fixtures/lb_futures_43.json");
  ExecContext ctx2 = ctx_for("lb.lit", external);
  ExploreResult r2 = explore(ctx2, external);

  auto strip = [](ExploreResult& r) {
    std::set<std::pair<std::map<ThreadId, RegFile>, std::map<std::string, Val>>> s;
    for (const auto& o : r.outcomes) s.insert({o.registers, o.finals});
    return s;
  };
  CHECK(strip(r1) == strip(r2));
}

TEST_CASE("explore: label futures reproduce the event-future outcomes") {
  RunSpec ev;
  ExecContext ctx = ctx_for("lb.lit", ev);
  ExploreResult r1 = explore(ctx, ev);
  RunSpec lf = ev;
  lf.label_mode = true;
  ExploreResult r2 = explore(ctx, lf);
  CHECK(reg_pairs(r1, "r1", "r2") == reg_pairs(r2, "r1", "r2"));
}

TEST_CASE("explore: racing updates exclude each other on the initial write") {
  RunSpec spec;
  spec.collect_stuck = true;
  ExecContext ctx = ctx_for("upd_race.lit", spec);
  ExploreResult res = explore(ctx, spec);
  CHECK(res.outcomes.empty());  // the loser blocks, so nothing terminates
  REQUIRE(!res.stuck.empty());
  for (int s : res.stuck) {
    const Graph& g = res.arena_configs[s].sigma;
    int updates = 0;
    for (const auto& ta : g.actions)
      if (ta.act.kind == ActKind::Update) {
        ++updates;
        CHECK(g.rf.preimage(ta.tag) == std::set<int>{0});  // read the initial write
      }
    CHECK(updates == 1);
  }
}

TEST_CASE("explore: silent register assignments run between memory actions") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb_data_ctrl_chain.lit", spec);
  ExploreResult res = explore(ctx, spec);
  auto pairs = reg_pairs(res, "r3", "r4");
  CHECK(!pairs.count({1, 2}));  // the out-of-thin-air shape is absent
}

TEST_CASE("external futures: silent commands missing from the file run in program order") {
  // the file leaves out the register assignment at line 2, like a futures
  // producer that only models memory events
  const char* prog = R"(
1: r1 := [x];
2: r2 := r1;
3: [y] := r2
|||
4: [x] := 1
)";
  const char* futures = R"({
    "events": [
      {"id": 1, "thread": 1, "label": {"kind": "R", "line": "1", "var": "x", "rval": 0}},
      {"id": 2, "thread": 1, "label": {"kind": "R", "line": "1", "var": "x", "rval": 1}},
      {"id": 3, "thread": 1, "label": {"kind": "W", "line": "3", "var": "y", "wval": 0}},
      {"id": 4, "thread": 1, "label": {"kind": "W", "line": "3", "var": "y", "wval": 1}},
      {"id": 5, "thread": 2, "label": {"kind": "W", "line": "4", "var": "x", "wval": 1}}
    ],
    "futures": [
      {"events": [1, 3, 5], "order": [[1, 3]]},
      {"events": [2, 4, 5], "order": [[2, 4]]}
    ]
  })";
  RunSpec builtin;
  ExecContext ctx1 = make_ctx(prog, builtin);
  ExploreResult a = explore(ctx1, builtin);

  RunSpec external;
  external.futures_json = futures;
  ExecContext ctx2 = make_ctx(prog, external);
  CHECK(ctx2.fallback_silent.count("2"));
  ExploreResult b = explore(ctx2, external);

  auto strip = [](const ExploreResult& r) {
    std::set<std::pair<std::map<ThreadId, RegFile>, std::map<std::string, Val>>> s;
    for (const auto& o : r.outcomes) s.insert({o.registers, o.finals});
    return s;
  };
  CHECK(strip(a) == strip(b));
  CHECK(b.outcomes.size() == 2);  // r1 = r2 = y-final in {0, 1}
}

TEST_CASE("replay: the dependency-violating trace is rejected") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  auto h1 = parse_trace(slurp("litmus/traces/lb_h1.trace"), ctx);
  CHECK(!replay_trace(ctx, spec, h1).accepted);
}

TEST_CASE("replay: the reordering-only trace is accepted") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  auto h2 = parse_trace(slurp("litmus/traces/lb_h2.trace"), ctx);
  CHECK(replay_trace(ctx, spec, h2).accepted);
}

TEST_CASE("replay: the empty trace on the empty program is accepted") {
  RunSpec spec;
  ExecContext ctx = make_ctx("1: skip", spec);
  CHECK(replay_trace(ctx, spec, {}).accepted);
}

TEST_CASE("replay: traces with unknown labels are rejected at parse time") {
  RunSpec spec;
  ExecContext ctx = ctx_for("lb.lit", spec);
  CHECK_THROWS_AS(parse_trace("t 1 R 99 x 0", ctx), TraceError);
}

TEST_CASE("replay: every witness emitted by explore is re-accepted") {
  for (const char* name : {"lb.lit", "lb_two_deps.lit", "lb_data_ctrl_chain.lit", "par_cond.lit"}) {
    RunSpec spec;
    ExecContext ctx = ctx_for(name, spec);
    ExploreResult res = explore(ctx, spec);
    REQUIRE(!res.outcomes.empty());
    for (const auto& o : res.outcomes) {
      auto trace = parse_trace(o.witness, ctx);
      CHECK(replay_trace(ctx, spec, trace).accepted);
    }
  }
}

TEST_CASE("partial conditional: final views relate w to r1 and z to r2") {
  RunSpec spec;
  ExecContext ctx = ctx_for("par_cond.lit", spec);
  ExploreResult res = explore(ctx, spec);
  for (const auto& o : res.outcomes) {
    CHECK(o.finals.at("w") == o.registers.at(2).at("r1"));
    CHECK(o.finals.at("z") == o.registers.at(2).at("r2"));
  }
}
