#pragma once

// Permutation CSPs of arity <= 3 above average: normalization to linear
// ordering, the five reduction rules, bucket (t-ordering) payoff
// polynomials, the Max-6-Lin-2 image F(C), witness recovery, and the solver.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "aboveavg/exact_search.hpp"
#include "aboveavg/lin2.hpp"
#include "aboveavg/ordering.hpp"
#include "aboveavg/polynomial.hpp"
#include "aboveavg/rational.hpp"
#include "aboveavg/verdict.hpp"

namespace aboveavg {

/// Bucket resolution used by the solving pipeline.
constexpr unsigned kPipelineBucketBits = 2;
/// 3! * 2^(3t) at t = 2; makes every coefficient of the aggregate polynomial integral.
constexpr Weight kOrderingScale = 384;

inline Weight factorial(unsigned n) {
  Weight f = 1;
  for (unsigned i = 2; i <= n; ++i) f *= i;
  return f;
}

// ---------------------------------------------------------------------------
// Permutation CSP -> linear ordering

/// Each constraint becomes one ordering constraint per satisfying pattern, of
/// the same weight; exactly one of them holds whenever the original does.
inline OrderingInstance perm_to_linear_ordering(const PermCspInstance& inst) {
  inst.validate();
  OrderingInstance out;
  out.num_vars = inst.num_vars;
  for (const auto& c : inst.constraints) {
    const auto& p = inst.predicates[c.predicate];
    if (p.arity > 3) throw std::invalid_argument("permutation predicates above arity 3 are not supported");
    for (const auto& pattern : p.satisfying) {
      OrderingConstraint oc;
      oc.weight = c.weight;
      // The tuple position holding rank r goes to slot r - 1.
      for (std::size_t i = 0; i < pattern.size(); ++i) oc.vars[pattern[i] - 1] = c.tuple[i];
      out.constraints.push_back(oc);
    }
  }
  return out;
}

/// Expected weight of a uniformly random ordering: sum of w / arity!.
inline Rational rho_W(const OrderingInstance& inst) {
  Rational total;
  for (const auto& c : inst.constraints) total += Rational(c.weight, factorial(c.arity()));
  return total;
}

inline Rational rho_W(const PermCspInstance& inst) {
  Rational total;
  for (const auto& c : inst.constraints) {
    const auto& p = inst.predicates.at(c.predicate);
    total += Rational(c.weight * static_cast<Weight>(p.satisfying.size()), factorial(p.arity));
  }
  return total;
}

// ---------------------------------------------------------------------------
// Reduction rules

namespace detail {

using Tuple3 = std::array<Var, 3>;

class RuleEngine {
 public:
  explicit RuleEngine(const OrderingInstance& inst) {
    for (const auto& c : inst.constraints) weights_[c.vars] += c.weight;
  }

  Weight shift() const { return shift_; }
  const std::map<Tuple3, Weight>& weights() const { return weights_; }

  void run() {
    bool changed = true;
    while (changed) {
      changed = false;
      drop_zero();
      changed |= cancel_binary();
      drop_zero();
      changed |= replace_edges();
      drop_zero();
      changed |= replace_cycles();
      drop_zero();
    }
  }

 private:
  Weight get(const Tuple3& t) const {
    auto it = weights_.find(t);
    return it == weights_.end() ? 0 : it->second;
  }

  void drop_zero() { std::erase_if(weights_, [](const auto& kv) { return kv.second == 0; }); }

  bool cancel_binary() {
    bool changed = false;
    for (auto& [t, w] : weights_) {
      if (t[2] != kNoVar || t[0] > t[1] || w == 0) continue;
      auto rev = weights_.find({t[1], t[0], kNoVar});
      if (rev == weights_.end() || rev->second == 0) continue;
      const Weight m = std::min(w, rev->second);
      w -= m;
      rev->second -= m;
      shift_ += m;  // every ordering satisfies exactly one of the pair
      changed = true;
    }
    return changed;
  }

  std::vector<Tuple3> ternary_triples() const {
    std::set<Tuple3> triples;
    for (const auto& [t, w] : weights_) {
      if (t[2] == kNoVar || w == 0) continue;
      Tuple3 s = t;
      std::sort(s.begin(), s.end());
      triples.insert(s);
    }
    return {triples.begin(), triples.end()};
  }

  /// Subtracts the minimum weight of the three constraints, all of which must be present.
  Weight take_min(const std::array<Tuple3, 3>& es) {
    Weight m = get(es[0]);
    for (const auto& e : es) m = std::min(m, get(e));
    if (m <= 0) return 0;
    for (const auto& e : es) weights_[e] -= m;
    return m;
  }

  bool replace_edges() {
    bool changed = false;
    for (const auto& tri : ternary_triples()) {
      for (Var a : tri)
        for (Var c : tri) {
          if (a == c) continue;
          const Var b = tri[0] ^ tri[1] ^ tri[2] ^ a ^ c;
          // abc, bac, acb are exactly the orders of {a,b,c} with a before c.
          const Weight m = take_min({Tuple3{a, b, c}, Tuple3{b, a, c}, Tuple3{a, c, b}});
          if (m == 0) continue;
          weights_[{a, c, kNoVar}] += m;
          changed = true;
        }
    }
    return changed;
  }

  bool replace_cycles() {
    bool changed = false;
    for (const auto& tri : ternary_triples()) {
      const auto [x, y, z] = tri;
      for (const Tuple3& e1 : {Tuple3{x, y, z}, Tuple3{x, z, y}}) {
        const auto [a, b, c] = e1;
        const Weight m = take_min({Tuple3{a, b, c}, Tuple3{b, c, a}, Tuple3{c, a, b}});
        if (m == 0) continue;
        weights_[{a, b, kNoVar}] += m;
        weights_[{b, c, kNoVar}] += m;
        weights_[{c, a, kNoVar}] += m;
        // Any ordering satisfies one or two of the added binaries, two exactly
        // when it satisfies one of the removed cyclic constraints.
        shift_ -= m;
        changed = true;
      }
    }
    return changed;
  }

  std::map<Tuple3, Weight> weights_;
  Weight shift_ = 0;
};

}  // namespace detail

/// Applies Redundancy, Merging, Cancellation, Edge Replacement and Cycle
/// Replacement to a fixpoint, then drops unused variables (renumbering the
/// rest densely; source_var maps back). The result satisfies
/// w(phi, inst) == w(phi, result) + (result.weight_shift - inst.weight_shift)
/// and rho_W(inst) == rho_W(result) + the same difference.
inline OrderingInstance apply_reduction_rules(const OrderingInstance& inst) {
  inst.validate();
  detail::RuleEngine engine(inst);
  engine.run();

  std::vector<std::uint8_t> used(inst.num_vars, 0);
  for (const auto& [t, w] : engine.weights())
    for (Var v : t)
      if (v != kNoVar) used[v] = 1;

  OrderingInstance out;
  out.irreducible = true;
  out.weight_shift = inst.weight_shift + engine.shift();
  std::vector<Var> dense(inst.num_vars, kNoVar);
  for (Var v = 0; v < inst.num_vars; ++v) {
    if (!used[v]) continue;
    dense[v] = static_cast<Var>(out.source_var.size());
    out.source_var.push_back(v);
  }
  out.num_vars = out.source_var.size();
  for (const auto& [t, w] : engine.weights()) {
    OrderingConstraint c;
    c.weight = w;
    for (std::size_t i = 0; i < 3; ++i) c.vars[i] = t[i] == kNoVar ? kNoVar : dense[t[i]];
    out.constraints.push_back(c);
  }
  return out;
}

/// Every triple carrying a ternary constraint misses some reverse pair
/// (both (a,m,c) and (c,m,a) absent for some middle m).
inline bool has_absent_pair_property(const OrderingInstance& inst) {
  std::set<detail::Tuple3> present;
  std::set<detail::Tuple3> triples;
  for (const auto& c : inst.constraints) {
    if (c.arity() != 3 || c.weight == 0) continue;
    present.insert(c.vars);
    auto s = c.vars;
    std::sort(s.begin(), s.end());
    triples.insert(s);
  }
  for (const auto& tri : triples) {
    bool absent = false;
    for (int m = 0; m < 3 && !absent; ++m) {
      const Var mid = tri[m];
      const Var a = tri[(m + 1) % 3];
      const Var c = tri[(m + 2) % 3];
      absent = !present.count({a, mid, c}) && !present.count({c, mid, a});
    }
    if (!absent) return false;
  }
  return true;
}

/// Direct check that none of the five rules applies.
inline bool is_irreducible(const OrderingInstance& inst) {
  std::map<detail::Tuple3, Weight> seen;
  std::vector<std::uint8_t> used(inst.num_vars, 0);
  for (const auto& c : inst.constraints) {
    if (c.weight <= 0) return false;
    if (!seen.emplace(c.vars, c.weight).second) return false;
    for (Var v : c.tuple()) used[v] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) return false;
  for (const auto& [t, w] : seen)
    if (t[2] == kNoVar && seen.count({t[1], t[0], kNoVar})) return false;
  for (const auto& [t, w] : seen) {
    if (t[2] == kNoVar) continue;
    const auto [a, b, c] = t;
    const bool edge = seen.count({b, a, c}) && seen.count({a, c, b});
    const bool cycle = seen.count({b, c, a}) && seen.count({c, a, b});
    if (edge || cycle) return false;
  }
  return has_absent_pair_property(inst);
}

// ---------------------------------------------------------------------------
// Bucket orderings

/// Each variable sits in one of 2^t buckets. Bucket index bits, most
/// significant first, are the components of the +-1 vector with bit 1
/// standing for -1, so numeric order is the lexicographic order with +1 < -1.
struct BucketAssignment {
  unsigned t = 1;
  std::vector<std::uint32_t> bucket;

  /// Component j (0-based) of variable v as a sign, +1 or -1.
  int component(Var v, unsigned j) const { return ((bucket[v] >> (t - 1 - j)) & 1) ? -1 : 1; }
};

/// Probability that a uniformly random refinement of the buckets orders the
/// tuple increasingly: zero unless buckets are non-decreasing along the
/// tuple, else the product of 1/n_b! over the tuple's bucket multiplicities.
inline Rational bucket_payoff(std::span<const std::uint32_t> tuple_buckets) {
  Weight denom = 1;
  std::size_t run = 1;
  for (std::size_t i = 1; i < tuple_buckets.size(); ++i) {
    if (tuple_buckets[i] < tuple_buckets[i - 1]) return Rational(0);
    if (tuple_buckets[i] == tuple_buckets[i - 1]) {
      ++run;
      denom *= static_cast<Weight>(run);
    } else {
      run = 1;
    }
  }
  return Rational(1, denom);
}

inline Rational bucket_payoff(const OrderingConstraint& e, const BucketAssignment& buckets) {
  std::array<std::uint32_t, 3> b{};
  const auto t = e.tuple();
  for (std::size_t i = 0; i < t.size(); ++i) b[i] = buckets.bucket.at(t[i]);
  return bucket_payoff(std::span<const std::uint32_t>(b.data(), t.size()));
}

/// Weighted expected payoff of a bucket assignment, w_t(phi_t).
inline Rational bucket_weight(const OrderingInstance& inst, const BucketAssignment& buckets) {
  Rational total;
  for (const auto& c : inst.constraints) total += bucket_payoff(c, buckets) * Rational(c.weight);
  return total;
}

/// Fourier expansion of the payoff of an arity-`arity` constraint under t
/// bucket bits. Local variable p*t + j is component j of tuple position p.
inline MultilinearPolynomial<Rational> payoff_polynomial(unsigned arity, unsigned t) {
  if (arity != 2 && arity != 3) throw std::invalid_argument("ordering constraints have arity 2 or 3");
  if (t < 1 || arity * t > 12) throw std::invalid_argument("payoff polynomial needs 1 <= t and arity * t <= 12");
  const unsigned bits = arity * t;
  const Weight fact = factorial(arity);
  std::vector<Weight> values(std::size_t{1} << bits);
  std::array<std::uint32_t, 3> b{};
  for (std::uint64_t point = 0; point < values.size(); ++point) {
    for (unsigned p = 0; p < arity; ++p) {
      b[p] = 0;
      for (unsigned j = 0; j < t; ++j) b[p] = (b[p] << 1) | static_cast<std::uint32_t>((point >> (p * t + j)) & 1);
    }
    const Rational g = bucket_payoff(std::span<const std::uint32_t>(b.data(), arity));
    values[point] = (g * Rational(fact)).num();  // integral: payoff is j / arity!
  }
  walsh_hadamard(std::span<Weight>(values));
  MultilinearPolynomial<Rational> poly;
  const Weight denom = fact << bits;
  for (std::uint64_t s = 0; s < values.size(); ++s)
    if (values[s] != 0) poly.add_term(monomial_from_mask(s), Rational(values[s], denom));
  return poly;
}

inline MultilinearPolynomial<Rational> payoff_polynomial(const OrderingConstraint& e, unsigned t) {
  return payoff_polynomial(e.arity(), t);
}

/// sum_e w_e g_e with variable v's bucket bits at global indices v*t .. v*t + t-1.
inline MultilinearPolynomial<Rational> aggregate_polynomial(const OrderingInstance& inst, unsigned t = kPipelineBucketBits) {
  const auto binary = payoff_polynomial(2, t);
  const auto ternary = payoff_polynomial(3, t);
  MultilinearPolynomial<Rational> total;
  std::vector<Var> mapping;
  for (const auto& c : inst.constraints) {
    const auto tuple = c.tuple();
    mapping.clear();
    for (Var v : tuple)
      for (unsigned j = 0; j < t; ++j) mapping.push_back(v * t + j);
    const auto& local = tuple.size() == 2 ? binary : ternary;
    total += local.renamed(mapping).scaled(Rational(c.weight));
  }
  return total;
}

/// Variables none of whose bucket bits appear in a non-constant monomial of
/// the t = 2 aggregate polynomial. Empty for irreducible instances.
inline std::vector<Var> representation_check(const OrderingInstance& inst) {
  const auto g = aggregate_polynomial(inst, kPipelineBucketBits);
  std::vector<std::uint8_t> represented(inst.num_vars, 0);
  for (const auto& [m, c] : g.terms())
    for (Var x : m) represented[x / kPipelineBucketBits] = 1;
  std::vector<Var> missing;
  for (Var v = 0; v < inst.num_vars; ++v)
    if (!represented[v]) missing.push_back(v);
  return missing;
}

/// The Max-6-Lin-2 system F(C): one equation per non-constant monomial of the
/// t = 2 aggregate polynomial, weight 384 |g(S)|, rhs 1 for negative
/// coefficients. Parity bit 1 stands for a -1 bucket component. For every
/// bucket assignment, 384 (w_t - rho W) == 2 sat - W_F.
inline Lin2System build_lin2(const OrderingInstance& inst) {
  const auto g = aggregate_polynomial(inst, kPipelineBucketBits);
  Lin2System sys;
  sys.num_vars = inst.num_vars * kPipelineBucketBits;
  sys.arity_bound = 3 * kPipelineBucketBits;
  sys.reduced = true;
  for (const auto& [m, coeff] : g.terms()) {
    if (m.empty()) continue;
    const Rational scaled = coeff * Rational(kOrderingScale);
    if (!scaled.is_integer()) throw std::logic_error("aggregate coefficient not integral at scale 384");
    const Weight w = scaled.num();
    sys.equations.push_back({m, static_cast<std::uint8_t>(w < 0 ? 1 : 0), w < 0 ? -w : w});
  }
  return sys;
}

/// Bucket assignment read from a Lin2 assignment over the F(C) variables.
inline BucketAssignment buckets_from_assignment(const Assignment& a, std::size_t num_vars,
                                                unsigned t = kPipelineBucketBits) {
  BucketAssignment b;
  b.t = t;
  b.bucket.assign(num_vars, 0);
  for (std::size_t v = 0; v < num_vars; ++v)
    for (unsigned j = 0; j < t; ++j) b.bucket[v] = (b.bucket[v] << 1) | a[v * t + j];
  return b;
}

/// Lin2 assignment over F(C) variables encoding a bucket assignment.
inline Assignment assignment_from_buckets(const BucketAssignment& b) {
  Assignment a(b.bucket.size() * b.t);
  for (std::size_t v = 0; v < b.bucket.size(); ++v)
    for (unsigned j = 0; j < b.t; ++j) a[v * b.t + j] = static_cast<std::uint8_t>((b.bucket[v] >> (b.t - 1 - j)) & 1);
  return a;
}

/// Extension of the bucket order whose weight is at least w_t(phi_t).
/// Buckets are emitted in order; inside a bucket the next variable is the one
/// maximizing the exact expected weight over uniform completions.
inline Ordering ordering_from_buckets(const OrderingInstance& inst, const BucketAssignment& buckets) {
  const std::size_t n = inst.num_vars;
  if (buckets.bucket.size() != n) throw std::invalid_argument("bucket assignment size differs from instance");

  std::vector<std::vector<std::size_t>> touching(n);
  for (std::size_t i = 0; i < inst.constraints.size(); ++i)
    for (Var v : inst.constraints[i].tuple()) touching[v].push_back(i);

  // Group key of a variable: placed ones by position, the unplaced ones of
  // the current bucket share one key, later buckets follow in order.
  constexpr std::uint64_t kPlacedLimit = std::uint64_t{1} << 40;
  std::vector<std::int64_t> position(n, -1);
  std::uint32_t current_bucket = 0;
  auto key = [&](Var v) -> std::uint64_t {
    if (position[v] >= 0) return static_cast<std::uint64_t>(position[v]);
    if (buckets.bucket[v] == current_bucket) return kPlacedLimit;
    return kPlacedLimit + 1 + (static_cast<std::uint64_t>(buckets.bucket[v]) - current_bucket);
  };
  // 6 * P(constraint satisfied | current partial placement).
  auto chance6 = [&](const OrderingConstraint& c) -> Weight {
    const auto t = c.tuple();
    std::uint64_t prev = key(t[0]);
    Weight denom = 1;
    std::size_t run = 1;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const std::uint64_t k = key(t[i]);
      if (k < prev) return 0;
      if (k == prev) {
        if (k < kPlacedLimit) return 0;
        denom *= static_cast<Weight>(++run);
      } else {
        run = 1;
      }
      prev = k;
    }
    return 6 / denom;
  };

  std::vector<Var> order(n);
  std::iota(order.begin(), order.end(), Var{0});
  std::stable_sort(order.begin(), order.end(), [&](Var a, Var b) { return buckets.bucket[a] < buckets.bucket[b]; });

  Ordering out;
  out.sequence.reserve(n);
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start;
    current_bucket = buckets.bucket[order[start]];
    while (end < n && buckets.bucket[order[end]] == current_bucket) ++end;
    std::vector<Var> pending(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
    while (!pending.empty()) {
      std::size_t best_idx = 0;
      Weight best_gain = std::numeric_limits<Weight>::min();
      for (std::size_t idx = 0; idx < pending.size(); ++idx) {
        const Var v = pending[idx];
        Weight before = 0;
        for (std::size_t ci : touching[v]) before += inst.constraints[ci].weight * chance6(inst.constraints[ci]);
        position[v] = static_cast<std::int64_t>(out.sequence.size());
        Weight after = 0;
        for (std::size_t ci : touching[v]) after += inst.constraints[ci].weight * chance6(inst.constraints[ci]);
        position[v] = -1;
        if (after - before > best_gain) {
          best_gain = after - before;
          best_idx = idx;
        }
      }
      const Var v = pending[best_idx];
      position[v] = static_cast<std::int64_t>(out.sequence.size());
      out.sequence.push_back(v);
      pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best_idx));
    }
    start = end;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Solvers

struct OrderingSolveOptions {
  std::size_t guard = kDefaultHeldKarpGuard;
};

/// Bookkeeping from one solve_ordering_aa run, used for kernel-size reporting.
struct OrderingRunStats {
  std::size_t reduced_vars = 0;    // |V| after the reduction rules
  std::size_t lin2_vars = 0;       // occurring variables of F(C)
  bool has_ternary = false;
  bool kernel_branch = false;      // exact search was needed
  std::vector<Var> unrepresented;  // must stay empty
};

/// Threshold rho*W + k for ordering instances.
inline Rational ordering_threshold(const OrderingInstance& inst, Weight k) { return rho_W(inst) + Rational(k); }

/// Decides whether some ordering reaches rho*W + k. Weights are in the units
/// of inst; the witness is an ordering of inst's variables.
inline Verdict<Ordering> solve_ordering_aa(const OrderingInstance& inst, Weight k, const OrderingSolveOptions& options = {},
                                           OrderingRunStats* stats = nullptr) {
  if (k < 1) throw std::invalid_argument("parameter k must be positive");
  const OrderingInstance reduced = apply_reduction_rules(inst);
  const Lin2System f = build_lin2(reduced);
  const auto collections = build_collections(f);

  auto lift = [&](const Ordering& phi) {
    Ordering out;
    std::vector<std::uint8_t> placed(inst.num_vars, 0);
    for (Var v : phi.sequence) {
      out.sequence.push_back(reduced.source_var[v]);
      placed[reduced.source_var[v]] = 1;
    }
    for (Var v = 0; v < inst.num_vars; ++v)
      if (!placed[v]) out.sequence.push_back(v);
    return out;
  };

  if (stats) {
    stats->reduced_vars = reduced.num_vars;
    stats->lin2_vars = f.occurring_vars().size();
    stats->has_ternary = reduced.has_ternary();
    stats->kernel_branch = false;
    stats->unrepresented = representation_check(reduced);
  }

  const Rational threshold = ordering_threshold(inst, k);
  if (auto j = collections.largest_heavy_layer(k * kOrderingScale)) {
    const Assignment y = assignment_above_average(f, collections, *j);
    const Ordering phi = ordering_from_buckets(reduced, buckets_from_assignment(y, reduced.num_vars));
    Ordering lifted = lift(phi);
    const Weight achieved = eval_ordering_weight(inst, lifted);
    if (Rational(achieved) < threshold) throw std::logic_error("bucket witness fell below the threshold");
    return Verdict<Ordering>::accept(std::move(lifted), achieved, Branch::yes_certificate);
  }

  if (stats) stats->kernel_branch = true;
  const auto opt = held_karp_ordering(reduced, options.guard);
  Ordering lifted = lift(opt.ordering);
  const Weight optimum = opt.weight + (reduced.weight_shift - inst.weight_shift);
  if (Rational(optimum) >= threshold) return Verdict<Ordering>::accept(std::move(lifted), optimum, Branch::held_karp);
  return Verdict<Ordering>::reject(std::move(lifted), optimum, Branch::held_karp);
}

/// Decides whether some ordering satisfies weight at least rho*W + k of a
/// permutation CSP of arity <= 3.
inline Verdict<Ordering> solve_perm_aa(const PermCspInstance& inst, Weight k, const OrderingSolveOptions& options = {},
                                       OrderingRunStats* stats = nullptr) {
  return solve_ordering_aa(perm_to_linear_ordering(inst), k, options, stats);
}

}  // namespace aboveavg
