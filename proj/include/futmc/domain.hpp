#ifndef FUTMC_DOMAIN_HPP
#define FUTMC_DOMAIN_HPP

#include <map>
#include <set>
#include <string>

#include "futmc/program.hpp"

namespace futmc {

/// Per-variable finite value range used when expanding loads into
/// per-value events.
using ValueDomain = std::map<std::string, std::set<Val>>;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least fixpoint of readable/storable values: every variable starts at
/// {0, init value} and grows by the value of every store expression under
/// every combination of values its registers may hold. Explicitly seeded
/// variables are pinned to their seed (the seed must contain the variable's
/// initial value). A domain growing past `cap` values raises DomainError.
ValueDomain value_closure(const Program& p, const ValueDomain& seeds = {}, std::size_t cap = 64);

}  // namespace futmc

#endif
