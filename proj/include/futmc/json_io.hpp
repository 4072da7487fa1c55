#ifndef FUTMC_JSON_IO_HPP
#define FUTMC_JSON_IO_HPP

#include <string>

#include "futmc/executor.hpp"
#include "futmc/future.hpp"
#include "futmc/graph.hpp"
#include "futmc/program.hpp"

namespace futmc {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Futures interchange schema:
///   { "events":  [{"id": int, "thread": int,
///                  "label": {"kind":"R|W|U|A", "line": str, "var": str,
///                            "rval": int?, "wval": int?,
///                            "mode": "rlx|rel|acq|ra"}}],
///     "futures": [{"events": [ids], "order": [[id,id],...]}] }
/// Kind "A" marks the silent event of a register assignment and carries no
/// variable or values. Orders must be acyclic; labels must name lines of
/// the program with a matching command kind.
FutureSet load_futures_json(const std::string& text, const Program& prog);
std::string dump_futures_json(const FutureSet& fs);

/// Graph dump: events as [tag, kind, line, var, rval?, wval?, mode, tid]
/// plus sb/rf/mo as tag-pair lists.
std::string dump_graph_json(const Graph& g);

/// Canonical outcome report: alphabetical keys, outcomes sorted; parsing
/// and re-rendering is byte-identical.
std::string render_outcomes_json(const ExploreResult& res);
std::string render_outcomes_table(const ExploreResult& res);

}  // namespace futmc

#endif
