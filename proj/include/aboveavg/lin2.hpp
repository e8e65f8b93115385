#pragma once

// Weighted Max-c-Lin-2 above average: reduction of degenerate pairs, the
// layered independent collections, the derandomized above-average witness,
// exhaustive kernel search, and the decision/kernel front ends.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "aboveavg/polynomial.hpp"
#include "aboveavg/rational.hpp"
#include "aboveavg/verdict.hpp"

namespace aboveavg {

/// One 0/1 value per variable.
struct Assignment {
  std::vector<std::uint8_t> bits;

  Assignment() = default;
  explicit Assignment(std::size_t n) : bits(n, 0) {}
  explicit Assignment(std::vector<std::uint8_t> b) : bits(std::move(b)) {}

  std::size_t size() const { return bits.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::uint8_t& operator[](std::size_t i) { return bits[i]; }

  friend bool operator==(const Assignment&, const Assignment&) = default;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// XOR of vars equals rhs, with a positive weight. vars is sorted and distinct.
struct Lin2Equation {
  std::vector<Var> vars;
  std::uint8_t rhs = 0;
  Weight weight = 1;

  friend bool operator==(const Lin2Equation&, const Lin2Equation&) = default;
};

inline Lin2Equation make_equation(std::vector<Var> vars, std::uint8_t rhs, Weight weight) {
  std::sort(vars.begin(), vars.end());
  if (vars.empty()) throw std::invalid_argument("equation has no variables");
  if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
    throw std::invalid_argument("equation repeats a variable");
  }
  if (rhs > 1) throw std::invalid_argument("right-hand side must be 0 or 1");
  if (weight < 1) throw std::invalid_argument("equation weight must be positive");
  return {std::move(vars), rhs, weight};
}

struct Lin2System {
  std::size_t num_vars = 0;
  unsigned arity_bound = 2;
  std::vector<Lin2Equation> equations;
  /// Weight stripped from every assignment by reduction:
  /// weight(original, a) == weight(this, a) + offset.
  Weight offset = 0;
  /// Set only by reduce_system: no two equations share a variable set.
  bool reduced = false;

  Weight total_weight() const {
    Weight w = 0;
    for (const auto& e : equations) w += e.weight;
    return w;
  }

  /// Total weight of the system before reduction stripped the offset.
  /// Each stripped unit removed one unit from two equations.
  Weight original_total_weight() const { return total_weight() + 2 * offset; }

  /// Sorted list of variables appearing in some equation.
  std::vector<Var> occurring_vars() const {
    std::vector<std::uint8_t> seen(num_vars, 0);
    for (const auto& e : equations)
      for (Var v : e.vars) seen[v] = 1;
    std::vector<Var> out;
    for (Var v = 0; v < num_vars; ++v)
      if (seen[v]) out.push_back(v);
    return out;
  }

  void validate() const {
    if (arity_bound < 1) throw std::invalid_argument("arity bound must be at least 1");
    for (const auto& e : equations) {
      if (e.vars.empty() || e.vars.size() > arity_bound) {
        throw std::invalid_argument("equation arity outside [1, c]");
      }
      if (!std::is_sorted(e.vars.begin(), e.vars.end()) ||
          std::adjacent_find(e.vars.begin(), e.vars.end()) != e.vars.end()) {
        throw std::invalid_argument("equation variables must be sorted and distinct");
      }
      if (e.vars.back() >= num_vars) throw std::invalid_argument("equation variable out of range");
      if (e.rhs > 1 || e.weight < 1) throw std::invalid_argument("bad equation rhs or weight");
    }
  }
};

inline bool satisfies(const Lin2Equation& e, const Assignment& a) {
  std::uint8_t parity = 0;
  for (Var v : e.vars) parity ^= a[v];
  return parity == e.rhs;
}

enum class Units { system, original };

/// Total weight of satisfied equations; Units::original re-adds the offset.
inline Weight eval_weight(const Lin2System& system, const Assignment& a, Units units = Units::system) {
  if (a.size() != system.num_vars) throw std::invalid_argument("assignment length does not match system");
  Weight w = 0;
  for (const auto& e : system.equations)
    if (satisfies(e, a)) w += e.weight;
  return units == Units::original ? w + system.offset : w;
}

// ---------------------------------------------------------------------------
// Reduction

namespace detail {

struct VarsHash {
  std::size_t operator()(const std::vector<Var>& vs) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (Var v : vs) h ^= std::hash<Var>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace detail

/// Merges identical equations and cancels complementary pairs. The result is
/// flagged reduced; its offset accumulates the weight each cancellation strips
/// from every assignment. Equal-weight complementary pairs vanish entirely.
inline Lin2System reduce_system(const Lin2System& system) {
  struct Bucket {
    Weight by_rhs[2] = {0, 0};
  };
  std::unordered_map<std::vector<Var>, std::size_t, detail::VarsHash> index;
  std::vector<std::pair<const std::vector<Var>*, Bucket>> groups;
  groups.reserve(system.equations.size());
  for (const auto& e : system.equations) {
    auto [it, inserted] = index.try_emplace(e.vars, groups.size());
    if (inserted) groups.push_back({&it->first, Bucket{}});
    groups[it->second].second.by_rhs[e.rhs] += e.weight;
  }

  Lin2System out;
  out.num_vars = system.num_vars;
  out.arity_bound = system.arity_bound;
  out.offset = system.offset;
  out.reduced = true;
  for (const auto& [vars, bucket] : groups) {
    const Weight w0 = bucket.by_rhs[0];
    const Weight w1 = bucket.by_rhs[1];
    const Weight lighter = std::min(w0, w1);
    out.offset += lighter;
    if (w0 == w1) continue;
    out.equations.push_back({*vars, static_cast<std::uint8_t>(w1 > w0 ? 1 : 0), std::max(w0, w1) - lighter});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Independent collections

/// Layered greedy collections S_c, ..., S_1. Each chosen equation of layer j
/// has exactly j variables outside the variables of higher layers, and those
/// fresh variables are disjoint within the layer.
struct IndependentCollections {
  struct Layer {
    unsigned j = 0;
    std::vector<std::size_t> equations;
    std::vector<std::vector<Var>> fresh_vars;  // parallel to equations
    Weight weight = 0;
  };

  unsigned arity_bound = 0;
  std::vector<Layer> layers;  // layers[0] is S_c, layers.back() is S_1

  const Layer& layer(unsigned j) const {
    if (j < 1 || j > arity_bound) throw std::out_of_range("layer index outside [1, c]");
    return layers[arity_bound - j];
  }

  /// Largest j with w(S_j) >= k, if any.
  std::optional<unsigned> largest_heavy_layer(Weight k) const {
    for (const auto& l : layers)
      if (l.weight >= k && !l.equations.empty()) return l.j;
    return std::nullopt;
  }
};

inline IndependentCollections build_collections(const Lin2System& system) {
  IndependentCollections out;
  out.arity_bound = system.arity_bound;
  std::vector<std::uint8_t> covered(system.num_vars, 0);   // var(S_c .. S_{j+1})
  std::vector<std::uint8_t> claimed(system.num_vars, 0);   // fresh vars taken in layer j
  std::vector<std::uint8_t> chosen(system.equations.size(), 0);
  std::vector<Var> fresh;

  for (unsigned j = system.arity_bound; j >= 1; --j) {
    IndependentCollections::Layer layer;
    layer.j = j;
    std::fill(claimed.begin(), claimed.end(), 0);
    for (std::size_t i = 0; i < system.equations.size(); ++i) {
      if (chosen[i]) continue;
      const auto& e = system.equations[i];
      fresh.clear();
      for (Var v : e.vars)
        if (!covered[v]) fresh.push_back(v);
      if (fresh.size() != j) continue;
      if (std::any_of(fresh.begin(), fresh.end(), [&](Var v) { return claimed[v] != 0; })) continue;
      for (Var v : fresh) claimed[v] = 1;
      chosen[i] = 1;
      layer.equations.push_back(i);
      layer.fresh_vars.push_back(fresh);
      layer.weight += e.weight;
    }
    for (std::size_t i : layer.equations)
      for (Var v : system.equations[i].vars) covered[v] = 1;
    out.layers.push_back(std::move(layer));
  }
  return out;
}

/// Assignment satisfying every equation of S_j whose weight is at least
/// (W - w(S_j))/2 + w(S_j). One fresh variable per S_j equation (the highest
/// index) is forced and substituted out; the remaining variables are fixed in
/// index order by conditional expectation.
inline Assignment assignment_above_average(const Lin2System& system, const IndependentCollections& collections,
                                           unsigned j) {
  const auto& layer = collections.layer(j);
  if (layer.equations.empty()) throw std::invalid_argument("layer S_j is empty");

  constexpr std::size_t kFree = static_cast<std::size_t>(-1);
  std::vector<std::size_t> forced_by(system.num_vars, kFree);
  for (std::size_t t = 0; t < layer.equations.size(); ++t) {
    forced_by[layer.fresh_vars[t].back()] = layer.equations[t];
  }

  // Substituted form of every equation: XOR over free vars equals target.
  struct Reduced {
    std::vector<Var> vars;
    std::uint8_t target;
    Weight weight;
    std::size_t remaining;
    std::uint8_t parity = 0;
  };
  std::vector<Reduced> reduced;
  reduced.reserve(system.equations.size());
  std::vector<Var> scratch;
  for (const auto& e : system.equations) {
    std::vector<Var> vars;
    std::uint8_t target = e.rhs;
    for (Var v : e.vars) {
      if (forced_by[v] == kFree) {
        scratch = {v};
      } else {
        const auto& f = system.equations[forced_by[v]];
        target ^= f.rhs;
        scratch.clear();
        for (Var u : f.vars)
          if (u != v) scratch.push_back(u);
      }
      std::vector<Var> merged;
      std::set_symmetric_difference(vars.begin(), vars.end(), scratch.begin(), scratch.end(),
                                    std::back_inserter(merged));
      vars = std::move(merged);
    }
    const std::size_t remaining = vars.size();
    reduced.push_back({std::move(vars), target, e.weight, remaining});
  }

  std::vector<std::vector<std::size_t>> occurrences(system.num_vars);
  for (std::size_t i = 0; i < reduced.size(); ++i)
    for (Var v : reduced[i].vars) occurrences[v].push_back(i);

  Assignment a(system.num_vars);
  for (Var x = 0; x < system.num_vars; ++x) {
    if (forced_by[x] != kFree) continue;
    // Only equations for which x is the last free variable change expectation.
    Weight gain[2] = {0, 0};
    for (std::size_t i : occurrences[x]) {
      const auto& r = reduced[i];
      if (r.remaining != 1) continue;
      for (std::uint8_t val = 0; val < 2; ++val)
        if ((r.parity ^ val) == r.target) gain[val] += r.weight;
    }
    const std::uint8_t val = gain[1] > gain[0] ? 1 : 0;
    a[x] = val;
    for (std::size_t i : occurrences[x]) {
      reduced[i].parity ^= val;
      --reduced[i].remaining;
    }
  }

  for (Var x = 0; x < system.num_vars; ++x) {
    if (forced_by[x] == kFree) continue;
    const auto& f = system.equations[forced_by[x]];
    std::uint8_t val = f.rhs;
    for (Var u : f.vars)
      if (u != x) val ^= a[u];
    a[x] = val;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Exhaustive search

constexpr std::size_t kDefaultExhaustiveGuard = 30;

struct Lin2Optimum {
  Assignment assignment;
  Weight weight = 0;  // in system units (offset not included)
};

/// Maximum-weight assignment over the occurring variables of a reduced
/// system. Ties go to the lexicographically smallest assignment.
inline Lin2Optimum exhaustive_solve(const Lin2System& system, std::size_t guard = kDefaultExhaustiveGuard) {
  if (!system.reduced) throw std::invalid_argument("exhaustive_solve requires a reduced system");
  const auto occ = system.occurring_vars();
  const std::size_t n = occ.size();
  if (n > guard) throw ResourceGuardError("exhaustive search", n, guard);
  if (n > 62) throw ResourceGuardError("exhaustive search", n, 62);

  // Local variable i sits at mask bit n-1-i so numeric order matches
  // lexicographic order of the assignment vector.
  std::vector<std::size_t> local(system.num_vars, 0);
  for (std::size_t i = 0; i < n; ++i) local[occ[i]] = i;
  std::vector<std::vector<std::size_t>> touching(n);
  for (std::size_t e = 0; e < system.equations.size(); ++e)
    for (Var v : system.equations[e].vars) touching[n - 1 - local[v]].push_back(e);

  std::vector<std::uint8_t> parity(system.equations.size(), 0);
  Weight current = 0;
  for (std::size_t e = 0; e < system.equations.size(); ++e)
    if (system.equations[e].rhs == 0) current += system.equations[e].weight;

  std::uint64_t best_mask = 0;
  Weight best = current;
  std::uint64_t gray = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const unsigned bit = static_cast<unsigned>(__builtin_ctzll(step));
    gray ^= std::uint64_t{1} << bit;
    for (std::size_t e : touching[bit]) {
      const auto& eq = system.equations[e];
      const bool was = parity[e] == eq.rhs;
      parity[e] ^= 1;
      current += was ? -eq.weight : eq.weight;
    }
    if (current > best || (current == best && gray < best_mask)) {
      best = current;
      best_mask = gray;
    }
  }

  Assignment a(system.num_vars);
  for (std::size_t i = 0; i < n; ++i) a[occ[i]] = static_cast<std::uint8_t>((best_mask >> (n - 1 - i)) & 1);
  return {std::move(a), best};
}

// ---------------------------------------------------------------------------
// Decision and kernel

struct SolveOptions {
  std::size_t guard = kDefaultExhaustiveGuard;
};

/// Threshold W/2 + k/2 in the original units of system.
inline Rational lin2_threshold(const Lin2System& system, Weight k) {
  return Rational(system.original_total_weight() + k, 2);
}

/// Decides whether some assignment reaches W/2 + k/2. Weights in the verdict
/// are in the original units of system (its offset re-added).
inline Verdict<Assignment> solve_aa(const Lin2System& system, Weight k, const SolveOptions& options = {}) {
  if (k < 1) throw std::invalid_argument("parameter k must be positive");
  system.validate();
  const Lin2System reduced = reduce_system(system);
  const auto collections = build_collections(reduced);
  if (auto j = collections.largest_heavy_layer(k)) {
    Assignment a = assignment_above_average(reduced, collections, *j);
    const Weight achieved = eval_weight(reduced, a, Units::original);
    return Verdict<Assignment>::accept(std::move(a), achieved, Branch::yes_certificate);
  }
  auto opt = exhaustive_solve(reduced, options.guard);
  const Weight optimum = opt.weight + reduced.offset;
  // 2 * optimum >= W_original + k
  if (2 * opt.weight >= reduced.total_weight() + k) {
    return Verdict<Assignment>::accept(std::move(opt.assignment), optimum, Branch::kernel_exhaustive);
  }
  return Verdict<Assignment>::reject(std::move(opt.assignment), optimum, Branch::kernel_exhaustive);
}

struct Lin2YesCertificate {
  Assignment assignment;
  Weight weight = 0;  // original units
};

/// Reduced system restricted to its occurring variables, renumbered densely.
/// It poses the same above-average question with the same k.
struct Lin2Kernel {
  Lin2System system;
  std::vector<Var> original_var;  // kernel variable -> input variable
};

using Lin2KernelResult = std::variant<Lin2YesCertificate, Lin2Kernel>;

/// Kernel bound c(c+1)k/2 on the occurring variables of a kernel.
inline Weight lin2_kernel_bound(unsigned c, Weight k) { return static_cast<Weight>(c) * (c + 1) * k / 2; }

inline Lin2KernelResult kernelize(const Lin2System& system, Weight k) {
  if (k < 1) throw std::invalid_argument("parameter k must be positive");
  system.validate();
  const Lin2System reduced = reduce_system(system);
  const auto collections = build_collections(reduced);
  if (auto j = collections.largest_heavy_layer(k)) {
    Assignment a = assignment_above_average(reduced, collections, *j);
    const Weight w = eval_weight(reduced, a, Units::original);
    return Lin2YesCertificate{std::move(a), w};
  }
  Lin2Kernel kernel;
  kernel.original_var = reduced.occurring_vars();
  std::vector<Var> to_kernel(reduced.num_vars, 0);
  for (std::size_t i = 0; i < kernel.original_var.size(); ++i) to_kernel[kernel.original_var[i]] = static_cast<Var>(i);
  kernel.system.num_vars = kernel.original_var.size();
  kernel.system.arity_bound = reduced.arity_bound;
  kernel.system.offset = reduced.offset;
  kernel.system.reduced = true;
  for (const auto& e : reduced.equations) {
    Lin2Equation r = e;
    for (Var& v : r.vars) v = to_kernel[v];
    kernel.system.equations.push_back(std::move(r));
  }
  return kernel;
}

/// Lifts a kernel assignment back to the variables of the input system.
inline Assignment lift_kernel_assignment(const Lin2Kernel& kernel, const Assignment& a, std::size_t num_vars) {
  Assignment out(num_vars);
  for (std::size_t i = 0; i < kernel.original_var.size(); ++i) out[kernel.original_var[i]] = a[i];
  return out;
}

}  // namespace aboveavg
