#include <doctest.h>

#include "property_suite.hpp"
#include "test_util.hpp"

using namespace futmc;
using namespace futmc::testutil;

TEST_CASE("randomized structural properties of the memory semantics") {
  PropertySuiteResult res = run_property_suite(200, 0x5eed);
  CHECK(res.programs >= 200);
  for (const auto& v : res.violations) {
    FAIL_CHECK(v);
  }
  CHECK(res.ok());
  MESSAGE("programs: " << res.programs << ", skipped: " << res.skipped
                       << ", states: " << res.states << ", transitions: " << res.transitions);
}

TEST_CASE("randomized: exploration agrees across worker counts") {
  std::mt19937 rng(0xbeef);
  int done = 0, attempts = 0;
  while (done < 25 && attempts < 200) {
    ++attempts;
    std::string text = random_program(rng);
    RunSpec one;
    one.budget = 4000;
    RunSpec four = one;
    four.jobs = 4;
    try {
      ExecContext ctx = prepare(parse_program(text), one);
      ExploreResult a = explore(ctx, one);
      ExploreResult b = explore(ctx, four);
      REQUIRE_MESSAGE(a.outcomes == b.outcomes, "program:\n" << text);
      REQUIRE_MESSAGE(a.states == b.states, "program:\n" << text);
      ++done;
    } catch (const BudgetError&) {
    } catch (const DomainError&) {
    } catch (const ExpansionError&) {
    }
  }
  CHECK(done >= 25);
}

TEST_CASE("randomized: collapsible label futures explore to the same outcomes") {
  std::mt19937 rng(0xcafe);
  int done = 0, attempts = 0;
  while (done < 25 && attempts < 300) {
    ++attempts;
    std::string text = random_program(rng);
    RunSpec ev;
    ev.budget = 4000;
    try {
      ExecContext ctx = prepare(parse_program(text), ev);
      CollapseResult col = collapse_labels(ctx.initial_futures);
      if (!col.ok) continue;  // collapse is only used when faithful
      ExploreResult a = explore(ctx, ev);
      RunSpec lf = ev;
      lf.label_mode = true;
      ExploreResult b = explore(ctx, lf);
      auto strip = [](const ExploreResult& r) {
        std::set<std::pair<std::map<ThreadId, RegFile>, std::map<std::string, Val>>> s;
        for (const auto& o : r.outcomes) s.insert({o.registers, o.finals});
        return s;
      };
      REQUIRE_MESSAGE(strip(a) == strip(b), "program:\n" << text);
      ++done;
    } catch (const BudgetError&) {
    } catch (const DomainError&) {
    } catch (const ExpansionError&) {
    }
  }
  CHECK(done >= 25);
}
