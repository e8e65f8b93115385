#pragma once

// Exhaustive reference solvers and the subset dynamic program for exact
// linear ordering. Every oracle breaks ties toward the lexicographically
// smallest witness.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "aboveavg/boolean_csp.hpp"
#include "aboveavg/lin2.hpp"
#include "aboveavg/ordering.hpp"
#include "aboveavg/verdict.hpp"

namespace aboveavg {

constexpr std::size_t kOracleGuard = 20;
constexpr std::size_t kOrderingOracleGuard = 10;
constexpr std::size_t kDefaultHeldKarpGuard = 24;

/// Optimum over all settings of the occurring variables, by direct
/// evaluation. Weight is in system units.
inline Lin2Optimum brute_force_lin2(const Lin2System& system) {
  const auto occ = system.occurring_vars();
  const std::size_t n = occ.size();
  if (n > kOracleGuard) throw ResourceGuardError("lin2 oracle", n, kOracleGuard);
  Assignment a(system.num_vars);
  Assignment best = a;
  Weight best_weight = -1;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) a[occ[i]] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1);
    Weight w = 0;
    for (const auto& e : system.equations) {
      unsigned ones = 0;
      for (Var v : e.vars) ones += a[v];
      if ((ones & 1u) == e.rhs) w += e.weight;
    }
    if (w > best_weight) {
      best_weight = w;
      best = a;
    }
  }
  return {std::move(best), best_weight};
}

struct CspOptimum {
  Assignment assignment;
  Weight weight = 0;
};

inline CspOptimum brute_force_csp(const BooleanCspInstance& inst) {
  const std::size_t n = inst.num_vars;
  if (n > kOracleGuard) throw ResourceGuardError("csp oracle", n, kOracleGuard);
  Assignment a(n);
  CspOptimum best{a, -1};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1);
    const Weight w = eval_csp_weight(inst, a);
    if (w > best.weight) best = {a, w};
  }
  return best;
}

struct OrderingOptimum {
  Ordering ordering;
  Weight weight = 0;
};

/// Optimum over all n! orderings.
inline OrderingOptimum brute_force_ordering(const OrderingInstance& inst) {
  const std::size_t n = inst.num_vars;
  if (n > kOrderingOracleGuard) throw ResourceGuardError("ordering oracle", n, kOrderingOracleGuard);
  Ordering phi;
  phi.sequence.resize(n);
  std::iota(phi.sequence.begin(), phi.sequence.end(), Var{0});
  OrderingOptimum best{phi, -1};
  std::vector<std::size_t> pos(n);
  do {
    for (std::size_t p = 0; p < n; ++p) pos[phi.sequence[p]] = p;
    Weight w = 0;
    for (const auto& c : inst.constraints) {
      const auto t = c.tuple();
      bool ok = true;
      for (std::size_t i = 1; i < t.size(); ++i) ok = ok && pos[t[i - 1]] < pos[t[i]];
      if (ok) w += c.weight;
    }
    if (w > best.weight) best = {phi, w};
  } while (std::next_permutation(phi.sequence.begin(), phi.sequence.end()));
  return best;
}

/// Weight charged when v is placed right after the set `before` (bitmask):
/// ternary (a, v, c) counts when a is before and c is after; binary (a, v)
/// counts when a is before. Each constraint is charged at exactly one
/// variable of any ordering, so the charges along an ordering sum to its weight.
inline Weight placement_charge(const OrderingInstance& inst, std::uint64_t before, Var v) {
  Weight w = 0;
  for (const auto& c : inst.constraints) {
    const auto t = c.tuple();
    if (t[1] != v) continue;
    const bool first_before = (before >> t[0]) & 1;
    if (t.size() == 2) {
      if (first_before) w += c.weight;
    } else if (first_before && !((before >> t[2]) & 1)) {
      w += c.weight;
    }
  }
  return w;
}

/// Held-Karp style DP over subsets: best(S) = max_{v in S} best(S - v) +
/// charge(S - v, v). O(2^n * m) time and O(2^n) memory.
inline OrderingOptimum held_karp_ordering(const OrderingInstance& inst, std::size_t guard = kDefaultHeldKarpGuard) {
  const std::size_t n = inst.num_vars;
  if (n > guard) throw ResourceGuardError("Held-Karp ordering", n, guard);
  if (n > 30) throw ResourceGuardError("Held-Karp ordering", n, 30);
  if (n == 0) return {};

  struct Middle {
    Var first;
    Var last;  // kNoVar for binary constraints
    Weight weight;
  };
  std::vector<std::vector<Middle>> by_middle(n);
  for (const auto& c : inst.constraints) by_middle[c.vars[1]].push_back({c.vars[0], c.vars[2], c.weight});

  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::vector<Weight> best(full + 1, 0);
  std::vector<std::uint8_t> last_placed(full + 1, 0);
  for (std::uint64_t s = 1; s <= full; ++s) {
    Weight top = std::numeric_limits<Weight>::min();
    std::uint8_t arg = 0;
    for (std::uint64_t rest = s; rest != 0; rest &= rest - 1) {
      const auto v = static_cast<Var>(__builtin_ctzll(rest));
      const std::uint64_t before = s & ~(std::uint64_t{1} << v);
      Weight charge = 0;
      for (const auto& m : by_middle[v]) {
        if (!((before >> m.first) & 1)) continue;
        if (m.last == kNoVar || !((before >> m.last) & 1)) charge += m.weight;
      }
      const Weight value = best[before] + charge;
      if (value > top) {
        top = value;
        arg = static_cast<std::uint8_t>(v);
      }
    }
    best[s] = top;
    last_placed[s] = arg;
  }

  OrderingOptimum out;
  out.weight = best[full];
  out.ordering.sequence.resize(n);
  std::uint64_t s = full;
  for (std::size_t p = n; p-- > 0;) {
    const Var v = last_placed[s];
    out.ordering.sequence[p] = v;
    s &= ~(std::uint64_t{1} << v);
  }
  return out;
}

}  // namespace aboveavg
