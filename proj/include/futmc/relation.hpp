#ifndef FUTMC_RELATION_HPP
#define FUTMC_RELATION_HPP

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

namespace futmc {

/// A binary relation over integer ids (event tags, future event ids).
/// Small sets only; everything is recomputed eagerly.
class Rel {
public:
  using Pair = std::pair<int, int>;

  Rel() = default;
  explicit Rel(std::set<Pair> pairs) : pairs_(std::move(pairs)) {}

  bool contains(int a, int b) const { return pairs_.count({a, b}) != 0; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }

  void insert(int a, int b) { pairs_.insert({a, b}); }
  void merge(const Rel& other) { pairs_.insert(other.pairs_.begin(), other.pairs_.end()); }

  const std::set<Pair>& pairs() const { return pairs_; }

  std::set<int> image(int a) const {
    std::set<int> out;
    for (auto it = pairs_.lower_bound({a, INT_MIN_}); it != pairs_.end() && it->first == a; ++it)
      out.insert(it->second);
    return out;
  }

  std::set<int> preimage(int b) const {
    std::set<int> out;
    for (const auto& [x, y] : pairs_)
      if (y == b) out.insert(x);
    return out;
  }

  Rel inverse() const {
    Rel r;
    for (const auto& [a, b] : pairs_) r.insert(b, a);
    return r;
  }

  /// Relational composition this ; other.
  Rel compose(const Rel& other) const {
    Rel r;
    for (const auto& [a, b] : pairs_)
      for (int c : other.image(b)) r.insert(a, c);
    return r;
  }

  Rel united(const Rel& other) const {
    Rel r = *this;
    r.merge(other);
    return r;
  }

  Rel transitive_closure() const {
    Rel r = *this;
    bool changed = true;
    while (changed) {
      changed = false;
      Rel step = r.compose(r);
      for (const auto& p : step.pairs())
        if (!r.pairs_.count(p)) {
          r.pairs_.insert(p);
          changed = true;
        }
    }
    return r;
  }

  bool irreflexive() const {
    for (const auto& [a, b] : pairs_)
      if (a == b) return false;
    return true;
  }

  bool acyclic() const { return transitive_closure().irreflexive(); }

  /// Restriction to pairs whose endpoints both satisfy keep.
  template <class Keep>
  Rel restricted(Keep keep) const {
    Rel r;
    for (const auto& [a, b] : pairs_)
      if (keep(a) && keep(b)) r.insert(a, b);
    return r;
  }

  Rel restricted_to(const std::set<int>& s) const {
    return restricted([&](int x) { return s.count(x) != 0; });
  }

  Rel minus_id() const {
    Rel r;
    for (const auto& [a, b] : pairs_)
      if (a != b) r.insert(a, b);
    return r;
  }

  bool operator==(const Rel& other) const { return pairs_ == other.pairs_; }
  bool operator!=(const Rel& other) const { return !(*this == other); }
  bool operator<(const Rel& other) const { return pairs_ < other.pairs_; }

private:
  static constexpr int INT_MIN_ = -2147483647 - 1;
  std::set<Pair> pairs_;
};

}  // namespace futmc

#endif
