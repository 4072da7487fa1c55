#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "futmc/json_io.hpp"
#include "futmc/proof.hpp"

using namespace futmc;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitParse = 2;
constexpr int kExitBudget = 3;
constexpr int kExitOutline = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --domain x=0..2,99,100
void parse_domain_flag(const std::string& s, ValueDomain& dom) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw std::runtime_error("--domain expects var=lo..hi[,v,...]");
  std::string var = s.substr(0, eq);
  std::set<Val> vals;
  std::istringstream in(s.substr(eq + 1));
  std::string part;
  while (std::getline(in, part, ',')) {
    auto dots = part.find("..");
    if (dots == std::string::npos) {
      vals.insert(std::stoll(part));
    } else {
      Val lo = std::stoll(part.substr(0, dots));
      Val hi = std::stoll(part.substr(dots + 2));
      for (Val v = lo; v <= hi; ++v) vals.insert(v);
    }
  }
  if (vals.empty()) throw std::runtime_error("--domain " + var + " is empty");
  dom[var] = std::move(vals);
}

struct CommonArgs {
  std::string program_path;
  int unroll = 2;
  std::vector<std::string> domain_flags;
  std::string futures_path;
  std::size_t budget = 1000000;
  int jobs = 1;
  std::string format = "table";
  bool label_futures = false;

  RunSpec spec() const {
    RunSpec s;
    s.unroll_depth = unroll;
    for (const auto& d : domain_flags) parse_domain_flag(d, s.domain_seeds);
    if (!futures_path.empty()) s.futures_json = slurp(futures_path);
    s.budget = budget;
    s.jobs = jobs;
    s.label_mode = label_futures;
    return s;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("program", program_path, "program file")->required();
    cmd->add_option("--unroll", unroll, "while-loop unrolling depth (default 2)");
    cmd->add_option("--domain", domain_flags, "value domain seed, var=lo..hi[,v,...]");
    cmd->add_option("--futures", futures_path, "load futures from a JSON file instead of computing them");
    cmd->add_option("--budget", budget, "state budget (default 1000000)");
    cmd->add_option("--jobs", jobs, "worker threads for exploration");
    cmd->add_option("--format", format, "table or json")->check(CLI::IsMember({"table", "json"}));
    cmd->add_flag("--label-futures", label_futures, "drive the search with collapsed label futures");
  }
};

ExecContext load(const CommonArgs& args, const RunSpec& spec) {
  Program p = parse_program(slurp(args.program_path));
  ExecContext ctx = prepare(p, spec);
  if (ctx.truncated_loops)
    std::cerr << "warning: while loops unrolled to depth " << spec.unroll_depth
              << "; longer iterations are truncated\n";
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"future-based exhaustive checker for relaxed-memory litmus tests and proof outlines"};
  app.require_subcommand(1);

  CommonArgs explore_args, check_args, prove_args, replay_args, futures_args;

  auto* cmd_explore = app.add_subcommand("explore", "enumerate all program outcomes");
  explore_args.attach(cmd_explore);

  auto* cmd_check = app.add_subcommand("check", "judge a condition over terminal configurations");
  check_args.attach(cmd_check);
  std::string check_mode, check_cond;
  cmd_check->add_option("mode", check_mode, "reachable or forbidden")
      ->required()
      ->check(CLI::IsMember({"reachable", "forbidden"}));
  cmd_check->add_option("condition", check_cond, "assertion over final configurations")->required();

  auto* cmd_prove = app.add_subcommand("prove", "check an Owicki-Gries proof outline");
  prove_args.attach(cmd_prove);
  std::string outline_path;
  cmd_prove->add_option("outline", outline_path, "proof outline JSON file")->required();

  auto* cmd_replay = app.add_subcommand("replay", "judge an explicit action trace");
  replay_args.attach(cmd_replay);
  std::string trace_path;
  cmd_replay->add_option("tracefile", trace_path, "trace file (one action per line)");
  cmd_replay->add_option("--trace", trace_path, "trace file (one action per line)");

  auto* cmd_futures = app.add_subcommand("futures", "dump the computed initial futures as JSON");
  futures_args.attach(cmd_futures);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_explore->parsed()) {
      RunSpec spec = explore_args.spec();
      ExecContext ctx = load(explore_args, spec);
      ExploreResult res = explore(ctx, spec);
      std::cout << (explore_args.format == "json" ? render_outcomes_json(res)
                                                  : render_outcomes_table(res));
      return 0;
    }
    if (cmd_check->parsed()) {
      RunSpec spec = check_args.spec();
      ExecContext ctx = load(check_args, spec);
      AssertPtr cond = parse_assertion(check_cond);
      ExploreResult res = explore(ctx, spec);
      int satisfying = 0;
      std::vector<std::string> witness;
      for (int t : res.terminals)
        if (eval_assertion(cond, ctx, res.arena_configs[t])) {
          if (!satisfying) witness = res.trace_to(t);
          ++satisfying;
        }
      bool want_reachable = check_mode == "reachable";
      bool verdict = want_reachable ? satisfying > 0 : satisfying == 0;
      std::cout << (verdict ? "OK" : "VIOLATION") << ": condition " << check_mode << " — "
                << satisfying << " of " << res.terminals.size()
                << " terminal state(s) satisfy it\n";
      if (want_reachable && verdict)
        for (const auto& l : witness) std::cout << "  " << l << "\n";
      if (!want_reachable && !verdict)
        for (const auto& l : witness) std::cout << "  " << l << "\n";
      return verdict ? 0 : kExitFail;
    }
    if (cmd_prove->parsed()) {
      RunSpec spec = prove_args.spec();
      ExecContext ctx = load(prove_args, spec);
      ProofOutline outline;
      try {
        outline = load_outline_json(slurp(outline_path), ctx);
      } catch (const OutlineError& e) {
        std::cerr << "outline error: " << e.what() << "\n";
        return kExitOutline;
      }
      ObligationReport rep = check_og(ctx, spec, outline);
      std::cout << (prove_args.format == "json" ? rep.render_json() : rep.render_table());
      return rep.ok ? 0 : kExitFail;
    }
    if (cmd_replay->parsed()) {
      if (trace_path.empty()) {
        std::cerr << "replay needs a trace file\n";
        return kExitParse;
      }
      RunSpec spec = replay_args.spec();
      ExecContext ctx = load(replay_args, spec);
      auto trace = parse_trace(slurp(trace_path), ctx);
      ReplayResult r = replay_trace(ctx, spec, trace);
      std::cout << (r.accepted ? "ALLOWED" : "DISALLOWED") << "\n";
      return r.accepted ? 0 : kExitFail;
    }
    if (cmd_futures->parsed()) {
      RunSpec spec = futures_args.spec();
      ExecContext ctx = load(futures_args, spec);
      std::cout << dump_futures_json(ctx.initial_futures);
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const TraceError& e) {
    std::cerr << "trace error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitParse;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return 0;
}
