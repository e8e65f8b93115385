#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aboveavg/polynomial.hpp"
#include "aboveavg/rational.hpp"

namespace aboveavg {

constexpr Var kNoVar = std::numeric_limits<Var>::max();

/// A linear order: sequence[p] is the variable placed at position p.
struct Ordering {
  std::vector<Var> sequence;

  std::size_t size() const { return sequence.size(); }

  /// position[v] for every variable v.
  std::vector<std::size_t> positions() const {
    std::vector<std::size_t> pos(sequence.size());
    for (std::size_t p = 0; p < sequence.size(); ++p) pos.at(sequence[p]) = p;
    return pos;
  }

  bool is_permutation_of(std::size_t n) const {
    if (sequence.size() != n) return false;
    std::vector<std::uint8_t> seen(n, 0);
    for (Var v : sequence) {
      if (v >= n || seen[v]) return false;
      seen[v] = 1;
    }
    return true;
  }

  friend bool operator==(const Ordering&, const Ordering&) = default;
};

/// Binary or ternary linear-ordering constraint, satisfied when the ordering
/// strictly increases along the tuple. Unused trailing slots hold kNoVar.
struct OrderingConstraint {
  std::array<Var, 3> vars{kNoVar, kNoVar, kNoVar};
  Weight weight = 1;

  unsigned arity() const { return vars[2] == kNoVar ? 2u : 3u; }
  std::span<const Var> tuple() const { return {vars.data(), arity()}; }

  static OrderingConstraint binary(Var a, Var b, Weight w) { return {{a, b, kNoVar}, w}; }
  static OrderingConstraint ternary(Var a, Var b, Var c, Weight w) { return {{a, b, c}, w}; }

  friend bool operator==(const OrderingConstraint&, const OrderingConstraint&) = default;
};

struct OrderingInstance {
  std::size_t num_vars = 0;
  std::vector<OrderingConstraint> constraints;
  /// w(phi, input) == w(phi, this) + weight_shift for every ordering phi.
  Weight weight_shift = 0;
  /// Set by apply_reduction_rules.
  bool irreducible = false;
  /// Variable of the instance this one was reduced from; empty means identity.
  std::vector<Var> source_var;

  Weight total_weight() const {
    Weight w = 0;
    for (const auto& c : constraints) w += c.weight;
    return w;
  }

  bool has_ternary() const {
    return std::any_of(constraints.begin(), constraints.end(), [](const auto& c) { return c.arity() == 3; });
  }

  void validate() const {
    for (const auto& c : constraints) {
      const auto t = c.tuple();
      if (c.vars[0] == kNoVar || c.vars[1] == kNoVar) throw std::invalid_argument("ordering constraint needs 2 or 3 variables");
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= num_vars) throw std::invalid_argument("ordering constraint variable out of range");
        for (std::size_t j = i + 1; j < t.size(); ++j)
          if (t[i] == t[j]) throw std::invalid_argument("ordering constraint repeats a variable");
      }
      if (c.weight < 0) throw std::invalid_argument("ordering constraint weight must be non-negative");
    }
  }
};

inline bool satisfies(const OrderingConstraint& c, std::span<const std::size_t> position) {
  const auto t = c.tuple();
  for (std::size_t i = 1; i < t.size(); ++i)
    if (position[t[i - 1]] >= position[t[i]]) return false;
  return true;
}

inline Weight eval_ordering_weight(const OrderingInstance& inst, const Ordering& phi) {
  if (!phi.is_permutation_of(inst.num_vars)) throw std::invalid_argument("ordering is not a permutation of the variables");
  const auto pos = phi.positions();
  Weight w = 0;
  for (const auto& c : inst.constraints)
    if (satisfies(c, pos)) w += c.weight;
  return w;
}

// ---------------------------------------------------------------------------
// Permutation CSPs

/// Satisfying patterns of a permutation predicate. A pattern lists the rank
/// (1-based) of each tuple position, e.g. "132" is satisfied when the first
/// variable comes first, the third second and the second last.
struct PermPredicate {
  std::string name;
  unsigned arity = 0;
  std::vector<std::vector<std::uint8_t>> satisfying;

  void validate() const {
    if (arity != 2 && arity != 3) throw std::invalid_argument("permutation predicate arity must be 2 or 3");
    if (satisfying.empty()) throw std::invalid_argument("permutation predicate has no satisfying pattern");
    for (const auto& p : satisfying) {
      if (p.size() != arity) throw std::invalid_argument("pattern length differs from predicate arity");
      auto sorted = p;
      std::sort(sorted.begin(), sorted.end());
      for (unsigned i = 0; i < arity; ++i)
        if (sorted[i] != i + 1) throw std::invalid_argument("pattern is not a permutation");
    }
  }

  friend bool operator==(const PermPredicate&, const PermPredicate&) = default;
};

struct PermConstraint {
  std::size_t predicate = 0;
  std::vector<Var> tuple;
  Weight weight = 1;

  friend bool operator==(const PermConstraint&, const PermConstraint&) = default;
};

struct PermCspInstance {
  std::size_t num_vars = 0;
  unsigned arity_bound = 3;
  std::vector<PermPredicate> predicates;
  std::vector<PermConstraint> constraints;

  Weight total_weight() const {
    Weight w = 0;
    for (const auto& c : constraints) w += c.weight;
    return w;
  }

  void validate() const {
    for (const auto& p : predicates) p.validate();
    for (const auto& c : constraints) {
      const auto& p = predicates.at(c.predicate);
      if (c.tuple.size() != p.arity) throw std::invalid_argument("constraint tuple length differs from predicate arity");
      if (p.arity > arity_bound) throw std::invalid_argument("constraint arity exceeds the arity bound");
      if (c.weight < 1) throw std::invalid_argument("constraint weight must be positive");
      for (std::size_t i = 0; i < c.tuple.size(); ++i) {
        if (c.tuple[i] >= num_vars) throw std::invalid_argument("constraint variable out of range");
        for (std::size_t j = i + 1; j < c.tuple.size(); ++j)
          if (c.tuple[i] == c.tuple[j]) throw std::invalid_argument("constraint tuple repeats a variable");
      }
    }
  }
};

/// Rank pattern of the tuple under the ordering given by position.
inline std::vector<std::uint8_t> rank_pattern(std::span<const Var> tuple, std::span<const std::size_t> position) {
  std::vector<std::uint8_t> ranks(tuple.size(), 1);
  for (std::size_t i = 0; i < tuple.size(); ++i)
    for (std::size_t j = 0; j < tuple.size(); ++j)
      if (position[tuple[j]] < position[tuple[i]]) ++ranks[i];
  return ranks;
}

inline Weight eval_perm_weight(const PermCspInstance& inst, const Ordering& phi) {
  if (!phi.is_permutation_of(inst.num_vars)) throw std::invalid_argument("ordering is not a permutation of the variables");
  const auto pos = phi.positions();
  Weight w = 0;
  for (const auto& c : inst.constraints) {
    const auto& sat = inst.predicates.at(c.predicate).satisfying;
    if (std::find(sat.begin(), sat.end(), rank_pattern(c.tuple, pos)) != sat.end()) w += c.weight;
  }
  return w;
}

}  // namespace aboveavg
