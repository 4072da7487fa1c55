#ifndef FUTMC_TESTS_PROPERTY_SUITE_HPP
#define FUTMC_TESTS_PROPERTY_SUITE_HPP

#include <random>
#include <sstream>

#include "futmc/executor.hpp"
#include "random_programs.hpp"

namespace futmc::testutil {

/// Randomized structural checks behind the memory semantics: explores small
/// random programs exhaustively and validates, at every reachable state and
/// transition,
///   - per-variable mo totality, rf agreement, hb acyclicity, tag
///     uniqueness, update atomicity, mo-maximal observability,
///   - encountered-write monotonicity along every transition,
///   - agreement of incrementally maintained derived relations with
///     from-scratch recomputation.
struct PropertySuiteResult {
  int programs = 0;
  int skipped = 0;  // domain divergence or budget blow-ups, re-drawn
  long states = 0;
  long transitions = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

inline PropertySuiteResult run_property_suite(int target_programs, unsigned seed) {
  PropertySuiteResult out;
  std::mt19937 rng(seed);
  int attempts = 0;
  const int max_attempts = target_programs * 10;

  while (out.programs < target_programs && attempts < max_attempts) {
    ++attempts;
    std::string text = random_program(rng);
    RunSpec spec;
    spec.budget = 5000;
    ExecContext ctx;
    ExploreResult res;
    try {
      ctx = prepare(parse_program(text), spec);
      res = explore(ctx, spec);
    } catch (const BudgetError&) {
      ++out.skipped;
      continue;
    } catch (const DomainError&) {
      ++out.skipped;
      continue;
    } catch (const ExpansionError&) {
      ++out.skipped;
      continue;
    }
    ++out.programs;
    out.states += static_cast<long>(res.states);
    out.transitions += static_cast<long>(res.transitions);

    auto blame = [&](int state, const std::string& what) {
      std::ostringstream os;
      os << what << "\nprogram:\n" << text << "state " << state;
      out.violations.push_back(os.str());
    };

    // structural invariants at every reachable state
    for (std::size_t s = 0; s < res.arena_configs.size(); ++s) {
      const Configuration& cfg = res.arena_configs[s];
      WellformedReport rep = check_wellformed(cfg.sigma);
      if (!rep.ok)
        for (const auto& v : rep.violations) blame(static_cast<int>(s), v);
      // every label still pending in a future has its command pending too
      std::set<std::string> live;
      for (const auto& [t, labs] : cfg.remaining) live.insert(labs.begin(), labs.end());
      for (const auto& lab : cfg.fut.remaining_labels())
        if (!live.count(lab))
          blame(static_cast<int>(s), "future event '" + lab + "' outlives its command");
    }

    // encountered writes grow monotonically along transitions
    std::map<int, std::map<int, std::set<int>>> ew_cache;
    auto ew_of = [&](int state) -> const std::map<int, std::set<int>>& {
      auto it = ew_cache.find(state);
      if (it == ew_cache.end()) {
        const Graph& g = res.arena_configs[state].sigma;
        DerivedRelations d = derived(g);
        std::map<int, std::set<int>> per_thread;
        for (const auto& [t, cmd] : ctx.prog.threads)
          per_thread[t] = encountered_writes(g, d, t);
        it = ew_cache.emplace(state, std::move(per_thread)).first;
      }
      return it->second;
    };
    for (const auto& e : res.edges) {
      if (e.act.kind == ActKind::Silent) continue;
      for (const auto& [t, pre_ew] : ew_of(e.from)) {
        const auto& post_ew = ew_of(e.to).at(t);
        for (int w : pre_ew)
          if (!post_ew.count(w)) {
            blame(e.from, "encountered writes shrank for thread " + std::to_string(t));
            break;
          }
      }
    }

    // incremental derived relations agree with recomputation
    std::size_t checked = 0;
    for (std::size_t s = 0; s < res.arena_configs.size() && checked < 200; ++s) {
      const Configuration& pre = res.arena_configs[s];
      for (const auto& succ : future_step(ctx, pre)) {
        if (succ.act.kind == ActKind::Silent) continue;
        ++checked;
        DerivedCache cache(pre.sigma);
        TaggedAction e{pre.sigma.fresh_tag(), succ.tid, succ.act};
        switch (succ.act.kind) {
          case ActKind::Read: cache.apply_read(e, *succ.observed); break;
          case ActKind::Write: cache.apply_write(e, *succ.observed); break;
          case ActKind::Update: cache.apply_rmw(e, *succ.observed); break;
          default: break;
        }
        DerivedRelations naive = derived(succ.cfg.sigma);
        if (!(cache.relations().hb == naive.hb && cache.relations().fr == naive.fr &&
              cache.relations().eco == naive.eco))
          blame(static_cast<int>(s), "incremental derived relations diverge after " +
                                         succ.act.str());
      }
    }
  }
  return out;
}

}  // namespace futmc::testutil

#endif
