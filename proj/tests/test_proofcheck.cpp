#include <doctest.h>

#include "futmc/proof.hpp"
#include "test_util.hpp"

using namespace futmc;
using namespace futmc::testutil;

namespace {

RunSpec rng_spec() {
  RunSpec spec;
  spec.domain_seeds = {{"x", {0, 1, 2, 99, 100}}, {"y", {0, 1, 2, 3, 100, 101}}};
  return spec;
}

ExecContext lb_ctx(const RunSpec& spec = {}) { return make_ctx(slurp("litmus/lb.lit"), spec); }

const Obligation* find_local(const ObligationReport& rep, ThreadId t, const std::string& sub,
                             const std::string& cmd) {
  for (const auto& ob : rep.obligations)
    if (ob.kind == Obligation::Kind::Local && ob.t1 == t && ob.sub1 == sub && ob.command == cmd)
      return &ob;
  return nullptr;
}

}  // namespace

TEST_CASE("check_hoare: load buffering satisfies its postcondition") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  AssertPtr X = parse_assertion("[x = 0]_{1,2} && [y = 0]_{1,2}");
  HoareResult r = check_hoare(ctx, spec, X, parse_assertion("r1 != 1 || r2 != 1"));
  CHECK(r.ok);
}

TEST_CASE("check_hoare: a too-strong postcondition fails with a witness") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  HoareResult r = check_hoare(ctx, spec, parse_assertion("true"),
                              parse_assertion("r1 != 1 || r2 != 2"));
  CHECK(!r.ok);
  CHECK(!r.counterexample.empty());  // the (1,2) execution
}

TEST_CASE("check_hoare: two-dependency variant pins both registers to zero") {
  RunSpec spec;
  ExecContext ctx = make_ctx(slurp("litmus/lb_two_deps.lit"), spec);
  HoareResult r = check_hoare(ctx, spec, parse_assertion("true"),
                              parse_assertion("r1 = 0 && r2 = 0"));
  CHECK(r.ok);
}

TEST_CASE("check_hoare: unsatisfied precondition fails the triple") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  HoareResult r = check_hoare(ctx, spec, parse_assertion("[x = 1]_1"), parse_assertion("true"));
  CHECK(!r.ok);
}

TEST_CASE("check_step_triple: thread 2 of the proof outline") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  ProofOutline outline = load_outline_json(slurp("outlines/lb.json"), ctx);
  const FuturePredicate& I2 = outline.preds.at(2);

  // {I}_G 3: r2 := [y] {I}_{G_3} (and line 4 to G_4): both pass
  Obligation g = check_step_triple(ctx, spec, I2, "G", I2);
  CHECK(g.verdict == Obligation::Verdict::Pass);
  CHECK(g.instances > 0);

  // {I}_{G_4} 3: r2 := [y] {I}_∅ passes through the disjunct analysis
  Obligation g4 = check_step_triple(ctx, spec, I2, "G4", I2);
  CHECK(g4.verdict == Obligation::Verdict::Pass);
  CHECK(g4.instances > 0);
}

TEST_CASE("check_step_triple: vacuous when the sub-future is unreachable") {
  RunSpec spec = rng_spec();
  ExecContext ctx = make_ctx(slurp("litmus/rng.lit"), spec);
  ProofOutline outline = load_outline_json(slurp("outlines/rng.json"), ctx);
  Obligation h5 = check_step_triple(ctx, spec, outline.preds.at(3), "H5", outline.preds.at(3));
  CHECK(h5.verdict == Obligation::Verdict::Vacuous);
  CHECK(h5.instances == 0);
}

TEST_CASE("check_future_stability: constant-true predicate") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  FuturePredicate I;
  I.thread = 1;
  I.fallback = parse_assertion("true");
  for (const auto& ob : check_future_stability(ctx, spec, I))
    CHECK(ob.verdict != Obligation::Verdict::Fail);
}

TEST_CASE("check_future_stability: thread 1 of the proof outline") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  ProofOutline outline = load_outline_json(slurp("outlines/lb.json"), ctx);
  for (const auto& ob : check_future_stability(ctx, spec, outline.preds.at(1)))
    CHECK(ob.verdict != Obligation::Verdict::Fail);
}

TEST_CASE("check_future_stability: a view broken by the thread's own write fails") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  ProofOutline outline = load_outline_json(slurp("outlines/lb.json"), ctx);
  FuturePredicate I1 = outline.preds.at(1);
  for (auto& n : I1.named)
    if (n.name == "end") n.assertion = parse_assertion("[y = 0]_2");
  bool failed = false;
  for (const auto& ob : check_future_stability(ctx, spec, I1))
    if (ob.verdict == Obligation::Verdict::Fail && ob.command == "2") failed = true;
  CHECK(failed);  // line 2 writes y, falsifying the view
}

TEST_CASE("check_og: the load-buffering outline is valid") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  ProofOutline outline = load_outline_json(slurp("outlines/lb.json"), ctx);
  ObligationReport rep = check_og(ctx, spec, outline);
  CHECK(rep.ok);
  CHECK(rep.failed() == 0);
  // the uninteresting obligations actually ran
  const Obligation* local = find_local(rep, 2, "G4", "3");
  REQUIRE(local);
  CHECK(local->verdict == Obligation::Verdict::Pass);
  CHECK(local->instances > 0);
}

TEST_CASE("check_og: the rng outline is valid") {
  RunSpec spec = rng_spec();
  ExecContext ctx = make_ctx(slurp("litmus/rng.lit"), spec);
  ProofOutline outline = load_outline_json(slurp("outlines/rng.json"), ctx);
  ObligationReport rep = check_og(ctx, spec, outline);
  CHECK(rep.ok);
  CHECK(rep.failed() == 0);
  CHECK(rep.vacuous() > 0);  // the dead branch is annotated but unreachable
}

TEST_CASE("check_og: the broken load-buffering outline fails globally") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  ProofOutline outline = load_outline_json(slurp("outlines/lb_bad.json"), ctx);
  ObligationReport rep = check_og(ctx, spec, outline);
  CHECK(!rep.ok);
  bool global_fail = false;
  for (const auto& ob : rep.obligations)
    if (ob.kind == Obligation::Kind::Global && ob.verdict == Obligation::Verdict::Fail &&
        ob.t1 == 1 && ob.t2 == 2) {
      global_fail = true;
      CHECK(!ob.counterexample.empty());
    }
  CHECK(global_fail);  // thread 2's write of x breaks thread 1's [x = 0]_1
}

TEST_CASE("check_og: the broken rng outline fails locally with a counterexample") {
  RunSpec spec = rng_spec();
  ExecContext ctx = make_ctx(slurp("litmus/rng.lit"), spec);
  ProofOutline outline = load_outline_json(slurp("outlines/rng_bad.json"), ctx);
  ObligationReport rep = check_og(ctx, spec, outline);
  CHECK(!rep.ok);
  bool found = false;
  for (const auto& ob : rep.obligations)
    if (ob.verdict == Obligation::Verdict::Fail && !ob.counterexample.empty()) found = true;
  CHECK(found);
}

TEST_CASE("check_og passing implies check_hoare passing") {
  struct Case {
    const char* prog;
    const char* outline;
    RunSpec spec;
  };
  std::vector<Case> cases{
      {"litmus/lb.lit", "outlines/lb.json", {}},
      {"litmus/rng.lit", "outlines/rng.json", rng_spec()},
      {"litmus/lb_data_ctrl_simple.lit", "outlines/lb_data_ctrl_simple.json", {}},
      {"litmus/lb_data_ctrl_chain.lit", "outlines/lb_data_ctrl_chain.json", {}}};
  for (const auto& c : cases) {
    ExecContext ctx = make_ctx(slurp(c.prog), c.spec);
    ProofOutline outline = load_outline_json(slurp(c.outline), ctx);
    ObligationReport rep = check_og(ctx, c.spec, outline);
    REQUIRE(rep.ok);
    HoareResult hoare = check_hoare(ctx, c.spec, outline.pre, outline.post);
    CHECK(hoare.ok);
  }
}

TEST_CASE("check_og: obligation count is deterministic") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  ProofOutline outline = load_outline_json(slurp("outlines/lb.json"), ctx);
  ObligationReport a = check_og(ctx, spec, outline);
  ObligationReport b = check_og(ctx, spec, outline);
  CHECK(a.obligations.size() == b.obligations.size());
  for (std::size_t i = 0; i < a.obligations.size(); ++i)
    CHECK(a.obligations[i].describe() == b.obligations[i].describe());
}

TEST_CASE("outline validation errors") {
  RunSpec spec;
  ExecContext ctx = lb_ctx(spec);
  CHECK_THROWS_AS(load_outline_json("{", ctx), OutlineError);
  // a sub-future violating the initial order is rejected
  const char* bad = R"({
    "pre": "true", "post": "true",
    "threads": {
      "1": { "subfutures": { "F": {"labels": ["1"]}, "end": {"labels": []} },
             "assertions": { "F": "true", "end": "true" } },
      "2": { "subfutures": { "G": {"labels": ["3","4"]}, "end": {"labels": []} },
             "assertions": { "G": "true", "end": "true" } }
    }
  })";
  // {1} alone is not up-closed: 2 depends on 1 and would be dropped
  CHECK_THROWS_AS(load_outline_json(bad, ctx), OutlineError);
  // missing empty sub-future
  const char* noempty = R"({
    "pre": "true", "post": "true",
    "threads": {
      "1": { "subfutures": { "F": {"labels": ["1","2"], "order": [["1","2"]]} },
             "assertions": { "F": "true" } },
      "2": { "subfutures": { "G": {"labels": ["3","4"]}, "end": {"labels": []} },
             "assertions": { "G": "true", "end": "true" } }
    }
  })";
  CHECK_THROWS_AS(load_outline_json(noempty, ctx), OutlineError);
}
