#ifndef FUTMC_PROGRAM_HPP
#define FUTMC_PROGRAM_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "futmc/expr.hpp"

namespace futmc {

using ThreadId = int;  // 0 is reserved for the initialising thread

enum class AtomKind { Skip, Store, Load, RegAssign, Update };

/// A labelled atomic command.
struct Atomic {
  AtomKind kind = AtomKind::Skip;
  std::string label;
  std::string var;   // Store / Load / Update
  std::string reg;   // Load / RegAssign
  ExprPtr expr;      // Store value, RegAssign value, Update expected value
  ExprPtr expr2;     // Update new value
  bool release = false;  // Store
  bool acquire = false;  // Load

  bool is_memory() const { return kind == AtomKind::Store || kind == AtomKind::Load || kind == AtomKind::Update; }

  bool operator==(const Atomic& o) const {
    auto estr = [](const ExprPtr& e) { return e ? e->str() : std::string(); };
    return kind == o.kind && label == o.label && var == o.var && reg == o.reg &&
           release == o.release && acquire == o.acquire && estr(expr) == estr(o.expr) &&
           estr(expr2) == estr(o.expr2);
  }
};

/// Command tree of a single thread. Seq children run left to right; If holds
/// [then, else]; While holds [body].
struct Command {
  enum class Kind { Atom, Seq, If, While } kind = Kind::Seq;
  Atomic atom;                     // Atom
  ExprPtr guard;                   // If / While
  std::vector<Command> children;

  static Command make_atom(Atomic a) {
    Command c;
    c.kind = Kind::Atom;
    c.atom = std::move(a);
    return c;
  }
  static Command make_seq(std::vector<Command> cs) {
    Command c;
    c.kind = Kind::Seq;
    c.children = std::move(cs);
    return c;
  }
  bool empty_seq() const { return kind == Kind::Seq && children.empty(); }
};

struct Program {
  std::map<ThreadId, Command> threads;
  std::map<std::string, Val> init_vars;       // shared-variable initial values
  std::map<std::string, Val> init_regs;       // register initial values (usually 0)
  std::set<std::string> vars;                 // all shared variables
  std::map<ThreadId, std::set<std::string>> regs;  // registers per thread

  /// Thread owning a register, for assertion evaluation. Throws if the
  /// register is owned by no thread or is ambiguous.
  ThreadId reg_owner(const std::string& reg) const;

  RegFile initial_regfile(ThreadId t) const;

  bool has_loops() const;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
        line(line), col(col) {}
};

/// Parse program text. Grammar:
///   program  := initline? thread ("|||" thread)*
///   initline := "init:" inits
///   thread   := stmt (";" stmt)*
///   stmt     := label ":" atomic
///             | "if" expr "then" "{" thread "}" ("else" "{" thread "}")?
///             | "while" expr "do" "{" thread "}"
///   atomic   := "[" var "]" ":=" ("^R")? expr
///             | reg ":=" ("^A")? "[" var "]"
///             | reg ":=" expr
///             | "upd^RA" "(" "[" var "]" "," expr "," expr ")"
///             | "skip"
/// Names appearing in brackets are shared variables, bare names are
/// registers; guards may mention registers only. Labels must be unique
/// across all threads.
Program parse_program(const std::string& text);

/// Replace every While by depth-nested Ifs. Iteration k of a loop relabels
/// the copied atomics as "<label>.<k>"; iterations beyond the depth become
/// Skip. Idempotent on loop-free programs.
Program unroll(const Program& p, int depth);

/// Per-thread set of all labelled atomic commands (both branches of every
/// If). Requires a loop-free program.
using AtomicSet = std::map<ThreadId, std::map<std::string, Atomic>>;
AtomicSet atomic_set(const Program& p);

/// Atomic command lookup by label across all threads, with owning thread.
std::map<std::string, std::pair<ThreadId, Atomic>> label_index(const Program& p);

}  // namespace futmc

#endif
