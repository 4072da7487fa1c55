#include <doctest.h>

#include "futmc/graph.hpp"
#include "test_util.hpp"

using namespace futmc;

namespace {

// the worked example: both threads of `r1:=[x]; [y]:=1 ||| r2:=[y]; [x]:=1`
// fully executed, with r1 = 0, r2 = 1
struct AppendixState {
  Graph g;
  int w0x, w0y, r1x0, w2y1, r3y1, w4x1;
};

AppendixState appendix() {
  AppendixState s;
  s.g = initial_graph({{"x", 0}, {"y", 0}});
  s.w0x = 0;
  s.w0y = 1;
  s.g = step_read(s.g, {s.g.fresh_tag(), 1, Action::read("1", "x", 0)}, s.w0x);
  s.r1x0 = 2;
  s.g = step_write(s.g, {s.g.fresh_tag(), 1, Action::write("2", "y", 1)}, s.w0y);
  s.w2y1 = 3;
  s.g = step_read(s.g, {s.g.fresh_tag(), 2, Action::read("3", "y", 1)}, s.w2y1);
  s.r3y1 = 4;
  s.g = step_write(s.g, {s.g.fresh_tag(), 2, Action::write("4", "x", 1)}, s.w0x);
  s.w4x1 = 5;
  return s;
}

}  // namespace

TEST_CASE("derived: empty graph") {
  Graph g;
  DerivedRelations d = derived(g);
  CHECK(d.hb.empty());
  CHECK(d.fr.empty());
  CHECK(d.eco.empty());
}

TEST_CASE("derived: appendix fr and eco") {
  AppendixState s = appendix();
  DerivedRelations d = derived(s.g);
  CHECK(d.fr.contains(s.r1x0, s.w4x1));
  CHECK(d.fr.size() == 1);
  // eco on x: W0x0 -rf-> R1x0, W0x0 -mo-> W4x1, R1x0 -fr-> W4x1
  CHECK(d.eco.contains(s.w0x, s.r1x0));
  CHECK(d.eco.contains(s.w0x, s.w4x1));
  CHECK(d.eco.contains(s.r1x0, s.w4x1));
  // eco on y: W0y0 -mo-> W2y1 -rf-> R3y1
  CHECK(d.eco.contains(s.w0y, s.w2y1));
  CHECK(d.eco.contains(s.w2y1, s.r3y1));
  CHECK(d.eco.contains(s.w0y, s.r3y1));
  // nothing crosses variables
  CHECK(!d.eco.contains(s.w0x, s.w2y1));
  CHECK(!d.eco.contains(s.w0y, s.w4x1));
  // relaxed rf contributes nothing to hb
  CHECK(!d.hb.contains(s.w2y1, s.r3y1));
}

TEST_CASE("derived: releasing write to acquiring read enters hb") {
  Graph g = initial_graph({{"x", 0}});
  g = step_write(g, {g.fresh_tag(), 1, Action::write("1", "x", 1, true)}, 0);
  g = step_read(g, {g.fresh_tag(), 2, Action::read("2", "x", 1, true)}, 1);
  DerivedRelations d = derived(g);
  CHECK(d.hb.contains(1, 2));
}

TEST_CASE("encountered writes") {
  AppendixState s = appendix();
  DerivedRelations d = derived(s.g);
  CHECK(encountered_writes(s.g, d, 7).empty());  // thread with no actions
  // after its first action a thread has encountered the initial writes
  Graph g = initial_graph({{"x", 0}, {"y", 0}});
  g = step_read(g, {g.fresh_tag(), 1, Action::read("1", "x", 0)}, 0);
  auto ew = encountered_writes(g, derived(g), 1);
  CHECK(ew.count(0));
  CHECK(ew.count(1));
  // appendix: thread 1 has not encountered W4x1
  auto ew1 = encountered_writes(s.g, d, 1);
  CHECK(ew1 == std::set<int>{s.w0x, s.w0y, s.w2y1});
}

TEST_CASE("observable writes match the worked example") {
  AppendixState s = appendix();
  DerivedRelations d = derived(s.g);
  CHECK(observable_writes(s.g, d, 1) == std::set<int>{s.w0x, s.w4x1, s.w2y1});
  CHECK(observable_writes(s.g, d, 2) == std::set<int>{s.w2y1, s.w4x1});
  Graph init = initial_graph({{"x", 0}, {"y", 0}});
  CHECK(observable_writes(init, derived(init), 1) == std::set<int>{0, 1});
}

TEST_CASE("covered writes") {
  Graph g = initial_graph({{"x", 0}, {"y", 0}});
  CHECK(covered_writes(g).empty());
  g = step_rmw(g, {g.fresh_tag(), 1, Action::update("1", "x", 0, 1)}, 0);
  CHECK(covered_writes(g) == std::set<int>{0});
  g = step_rmw(g, {g.fresh_tag(), 2, Action::update("2", "y", 0, 5)}, 1);
  CHECK(covered_writes(g) == std::set<int>{0, 1});
}

TEST_CASE("add_event: sb goes from initialisers and same-thread events only") {
  Graph g = initial_graph({{"x", 0}, {"y", 0}});
  g = add_event(g, {g.fresh_tag(), 1, Action::read("1", "x", 0)});
  CHECK(g.sb.contains(0, 2));
  CHECK(g.sb.contains(1, 2));
  g = add_event(g, {g.fresh_tag(), 1, Action::write("2", "y", 1)});
  CHECK(g.sb.contains(2, 3));
  g = add_event(g, {g.fresh_tag(), 2, Action::read("3", "y", 0)});
  CHECK(!g.sb.contains(2, 4));
  CHECK(!g.sb.contains(3, 4));
  CHECK(g.sb.contains(0, 4));
  // initial writes are unordered among themselves
  CHECK(!g.sb.contains(0, 1));
  CHECK(!g.sb.contains(1, 0));
  CHECK_THROWS_AS(add_event(g, {2, 1, Action::read("9", "x", 0)}), StepError);
}

TEST_CASE("insert_mo puts the event immediately after the chosen write") {
  Rel empty;
  Rel a = insert_mo(empty, 7, 9);
  CHECK(a.pairs() == std::set<std::pair<int, int>>{{7, 9}});

  Rel chain;
  chain.insert(0, 1);
  Rel after0 = insert_mo(chain, 0, 9);
  CHECK(after0.pairs() == std::set<std::pair<int, int>>{{0, 1}, {0, 9}, {9, 1}});
  Rel after1 = insert_mo(chain, 1, 9);
  CHECK(after1.pairs() == std::set<std::pair<int, int>>{{0, 1}, {0, 9}, {1, 9}});
}

TEST_CASE("step_read: value and observability checks") {
  Graph init = initial_graph({{"x", 0}, {"y", 0}});
  // only the initial write exists, so a read of x must see 0
  CHECK_THROWS_AS(step_read(init, {init.fresh_tag(), 1, Action::read("1", "x", 1)}, 0), StepError);
  Graph g = step_read(init, {init.fresh_tag(), 1, Action::read("1", "x", 0)}, 0);
  CHECK(g.rf.contains(0, 2));

  AppendixState s = appendix();
  DerivedRelations d = derived(s.g);
  // thread 1 may read x = 0 or x = 1
  auto ow1 = observable_writes(s.g, d, 1);
  CHECK(ow1.count(s.w0x));
  CHECK(ow1.count(s.w4x1));
  Graph r0 = step_read(s.g, {s.g.fresh_tag(), 1, Action::read("9", "x", 0)}, s.w0x);
  CHECK(r0.rf.contains(s.w0x, 6));
  Graph r1 = step_read(s.g, {s.g.fresh_tag(), 1, Action::read("9", "x", 1)}, s.w4x1);
  CHECK(r1.rf.contains(s.w4x1, 6));
  // thread 2 has encountered W4x1, so W0x0 is stale for it
  CHECK_THROWS_AS(step_read(s.g, {s.g.fresh_tag(), 2, Action::read("9", "x", 0)}, s.w0x),
                  StepError);
}

TEST_CASE("step_write: insertion, covered exclusion, chains") {
  Graph init = initial_graph({{"x", 0}, {"y", 0}});
  Graph g = step_write(init, {init.fresh_tag(), 2, Action::write("4", "x", 1)}, 0);
  CHECK(g.mo.pairs() == std::set<std::pair<int, int>>{{0, 2}});

  // a covered write is no insertion point
  Graph u = step_rmw(init, {init.fresh_tag(), 1, Action::update("1", "x", 0, 1)}, 0);
  CHECK_THROWS_AS(step_write(u, {u.fresh_tag(), 2, Action::write("4", "x", 7)}, 0), StepError);

  // two sequential writes by one thread chain after the initial write
  Graph w1 = step_write(init, {init.fresh_tag(), 1, Action::write("1", "x", 1)}, 0);
  Graph w2 = step_write(w1, {w1.fresh_tag(), 1, Action::write("2", "x", 2)}, 2);
  Rel mox = w2.mo.transitive_closure();
  CHECK(mox.contains(0, 2));
  CHECK(mox.contains(2, 3));
  CHECK(mox.contains(0, 3));
}

TEST_CASE("step_rmw: reads and covers its source atomically") {
  Graph init = initial_graph({{"x", 0}});
  Graph g = step_rmw(init, {init.fresh_tag(), 1, Action::update("1", "x", 0, 1)}, 0);
  CHECK(g.rf.contains(0, 1));
  CHECK(g.mo.contains(0, 1));
  // the initial write is now covered
  CHECK_THROWS_AS(step_rmw(g, {g.fresh_tag(), 2, Action::update("2", "x", 0, 2)}, 0), StepError);
  // no write of the expected value
  CHECK_THROWS_AS(step_rmw(init, {init.fresh_tag(), 1, Action::update("1", "x", 5, 1)}, 0),
                  StepError);
}

TEST_CASE("wellformedness of constructed states") {
  AppendixState s = appendix();
  CHECK(check_wellformed(s.g).ok);
  Graph init = initial_graph({{"x", 0}});
  CHECK(check_wellformed(init).ok);
  // a value-disagreeing rf edge is flagged
  Graph broken = s.g;
  broken.rf.insert(s.w2y1, s.r1x0);
  CHECK(!check_wellformed(broken).ok);
}

TEST_CASE("incremental derived relations match recomputation") {
  Graph init = initial_graph({{"x", 0}, {"y", 0}});
  DerivedCache cache(init);

  auto check_agree = [&]() {
    DerivedRelations naive = derived(cache.graph());
    CHECK(cache.relations().hb == naive.hb);
    CHECK(cache.relations().fr == naive.fr);
    CHECK(cache.relations().eco == naive.eco);
  };

  cache.apply_read({cache.graph().fresh_tag(), 1, Action::read("1", "x", 0)}, 0);
  check_agree();
  cache.apply_write({cache.graph().fresh_tag(), 1, Action::write("2", "y", 1)}, 1);
  check_agree();
  cache.apply_read({cache.graph().fresh_tag(), 2, Action::read("3", "y", 1)}, 3);
  check_agree();
  cache.apply_write({cache.graph().fresh_tag(), 2, Action::write("4", "x", 1)}, 0);
  check_agree();
  cache.apply_rmw({cache.graph().fresh_tag(), 2, Action::update("5", "x", 1, 2)}, 5);
  check_agree();
}
