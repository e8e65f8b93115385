#pragma once

// Boolean Max-c-CSP above average. Constraints are truth-table predicates.
// Variable value 1 means True, which is -1 in the +-1 domain of the Fourier
// expansions (x = 1 - 2a).

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "aboveavg/lin2.hpp"
#include "aboveavg/polynomial.hpp"
#include "aboveavg/rational.hpp"
#include "aboveavg/verdict.hpp"

namespace aboveavg {

constexpr unsigned kMaxPredicateArity = 16;

/// truth_table[b] is the value when input i is True exactly for the set bits i of b.
struct Predicate {
  std::string name;
  unsigned arity = 0;
  std::vector<std::uint8_t> truth_table;

  std::size_t ones() const { return static_cast<std::size_t>(std::count(truth_table.begin(), truth_table.end(), 1)); }

  void validate() const {
    if (arity < 1 || arity > kMaxPredicateArity) throw std::invalid_argument("predicate arity outside [1, 16]");
    if (truth_table.size() != (std::size_t{1} << arity)) throw std::invalid_argument("truth table length is not 2^arity");
    for (auto bit : truth_table)
      if (bit > 1) throw std::invalid_argument("truth table entries must be 0 or 1");
  }

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct BooleanConstraint {
  std::size_t predicate = 0;  // index into BooleanCspInstance::predicates
  std::vector<Var> tuple;
  Weight weight = 1;

  friend bool operator==(const BooleanConstraint&, const BooleanConstraint&) = default;
};

struct BooleanCspInstance {
  std::size_t num_vars = 0;
  unsigned arity_bound = 2;
  std::vector<Predicate> predicates;
  std::vector<BooleanConstraint> constraints;

  Weight total_weight() const {
    Weight w = 0;
    for (const auto& c : constraints) w += c.weight;
    return w;
  }

  const Predicate& predicate_of(const BooleanConstraint& c) const { return predicates.at(c.predicate); }

  /// Index of an existing predicate with the same name, or of a newly added one.
  std::size_t intern(Predicate p) {
    for (std::size_t i = 0; i < predicates.size(); ++i)
      if (predicates[i].name == p.name) {
        if (predicates[i] != p) throw std::invalid_argument("conflicting definitions of predicate " + p.name);
        return i;
      }
    predicates.push_back(std::move(p));
    return predicates.size() - 1;
  }

  void validate() const {
    for (const auto& p : predicates) p.validate();
    for (const auto& c : constraints) {
      const auto& p = predicates.at(c.predicate);
      if (c.tuple.size() != p.arity) throw std::invalid_argument("constraint tuple length differs from predicate arity");
      if (p.arity > arity_bound) throw std::invalid_argument("constraint arity exceeds the arity bound");
      if (c.weight < 1) throw std::invalid_argument("constraint weight must be positive");
      auto sorted = c.tuple;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("constraint tuple repeats a variable");
      if (!sorted.empty() && sorted.back() >= num_vars) throw std::invalid_argument("constraint variable out of range");
    }
  }
};

inline std::size_t truth_table_index(const BooleanConstraint& c, const Assignment& a) {
  std::size_t b = 0;
  for (std::size_t i = 0; i < c.tuple.size(); ++i) b |= static_cast<std::size_t>(a[c.tuple[i]]) << i;
  return b;
}

inline Weight eval_csp_weight(const BooleanCspInstance& inst, const Assignment& a) {
  if (a.size() != inst.num_vars) throw std::invalid_argument("assignment length does not match instance");
  Weight w = 0;
  for (const auto& c : inst.constraints)
    if (inst.predicate_of(c).truth_table[truth_table_index(c, a)]) w += c.weight;
  return w;
}

/// Exact Fourier expansion over the predicate's local inputs 0..arity-1.
inline MultilinearPolynomial<DyadicRational> fourier_expand(const Predicate& p) {
  p.validate();
  std::vector<std::int64_t> values(p.truth_table.begin(), p.truth_table.end());
  walsh_hadamard(std::span<std::int64_t>(values));
  MultilinearPolynomial<DyadicRational> poly;
  for (std::uint64_t s = 0; s < values.size(); ++s) {
    if (values[s] != 0) poly.add_term(monomial_from_mask(s), DyadicRational(values[s], p.arity));
  }
  return poly;
}

/// Expected weight of a uniformly random assignment, rho * W.
inline Rational average_weight(const BooleanCspInstance& inst) {
  DyadicRational total;
  for (const auto& c : inst.constraints) {
    const auto& p = inst.predicate_of(c);
    total += DyadicRational(static_cast<std::int64_t>(p.ones()), p.arity) * DyadicRational(c.weight);
  }
  return total.to_rational();
}

/// Sum of w_i * p_i over constraints, on global variable indices. Its constant
/// term is rho * W.
inline MultilinearPolynomial<DyadicRational> csp_polynomial(const BooleanCspInstance& inst) {
  std::vector<MultilinearPolynomial<DyadicRational>> expansions;
  expansions.reserve(inst.predicates.size());
  for (const auto& p : inst.predicates) expansions.push_back(fourier_expand(p));
  MultilinearPolynomial<DyadicRational> total;
  for (const auto& c : inst.constraints) {
    total += expansions[c.predicate].renamed(c.tuple).scaled(DyadicRational(c.weight));
  }
  return total;
}

/// Max-c-CSP threshold rho*W + k/2^c.
inline Rational csp_threshold(const BooleanCspInstance& inst, Weight k) {
  return average_weight(inst) + Rational(k, std::int64_t{1} << inst.arity_bound);
}

/// One equation per non-constant monomial of the centred polynomial, weighted
/// by 2^c times its coefficient; negative coefficients become rhs 1. For every
/// assignment a: 2^c (csp(a) - rho W) == 2 sat(a) - W_lin.
inline Lin2System csp_to_lin2(const BooleanCspInstance& inst) {
  inst.validate();
  if (inst.arity_bound > 30) throw std::invalid_argument("arity bound too large for integral scaling");
  const auto r = csp_polynomial(inst);
  Lin2System sys;
  sys.num_vars = inst.num_vars;
  sys.arity_bound = std::max(2u, inst.arity_bound);
  sys.reduced = true;  // one equation per distinct monomial
  for (const auto& [mono, coeff] : r.terms()) {
    if (mono.empty()) continue;
    const Weight scaled = coeff.scaled_integer(inst.arity_bound);
    sys.equations.push_back({mono, static_cast<std::uint8_t>(scaled < 0 ? 1 : 0), scaled < 0 ? -scaled : scaled});
  }
  return sys;
}

/// Decides whether some assignment reaches rho*W + k/2^c.
inline Verdict<Assignment> solve_csp_aa(const BooleanCspInstance& inst, Weight k, const SolveOptions& options = {}) {
  if (k < 1) throw std::invalid_argument("parameter k must be positive");
  const auto lin = csp_to_lin2(inst);
  auto v = solve_aa(lin, k, options);
  // Boolean 1 maps to -1 which is parity bit 1, so the witness carries over unchanged.
  const Weight w = eval_csp_weight(inst, v.witness);
  v.weight = w;
  return v;
}

struct HybridResult {
  enum class Kind { exact, approx };
  Kind kind = Kind::exact;
  Assignment assignment;
  Weight weight = 0;
  Weight k = 0;  // ceil(eps * W), at least 1
};

/// Guaranteed weight of an approximate hybrid answer, rho*W + eps*W/2^(c+1).
inline Rational hybrid_approx_bound(const BooleanCspInstance& inst, const Rational& eps) {
  return average_weight(inst) + eps * Rational(inst.total_weight()) / Rational(std::int64_t{1} << (inst.arity_bound + 1));
}

/// Either an assignment beating rho*W + eps*W/2^(c+1) found in polynomial
/// time, or an optimal assignment found by exhaustive search over the
/// O(eps W) variables that remain.
inline HybridResult hybrid_solve(const BooleanCspInstance& inst, const Rational& eps, const SolveOptions& options = {}) {
  if (eps.sign() <= 0 || eps > Rational(1)) throw std::invalid_argument("eps must lie in (0, 1]");
  const Weight k = std::max<Weight>(1, (eps * Rational(inst.total_weight())).ceil());
  const auto lin = reduce_system(csp_to_lin2(inst));
  const auto collections = build_collections(lin);
  HybridResult out;
  out.k = k;
  if (auto j = collections.largest_heavy_layer(k)) {
    out.kind = HybridResult::Kind::approx;
    out.assignment = assignment_above_average(lin, collections, *j);
  } else {
    out.kind = HybridResult::Kind::exact;
    out.assignment = exhaustive_solve(lin, options.guard).assignment;
  }
  out.weight = eval_csp_weight(inst, out.assignment);
  return out;
}

// ---------------------------------------------------------------------------
// Lin2 back to CSP

struct CspFromLin2 {
  BooleanCspInstance instance;
  /// Max-c-CSP parameter is k * parameter_scale for a Lin2 parameter k.
  Weight parameter_scale = 1;
};

/// Each equation of arity s becomes the 2^(s-1) width-s clauses that each
/// forbid one violating assignment. Per assignment, csp(a) - AVG == sat(a) - W/2.
inline CspFromLin2 lin2_to_csp(const Lin2System& system) {
  if (!system.reduced) throw std::invalid_argument("lin2_to_csp requires a reduced system");
  system.validate();
  CspFromLin2 out;
  auto& inst = out.instance;
  inst.num_vars = system.num_vars;
  inst.arity_bound = system.arity_bound;
  for (const auto& e : system.equations) {
    const unsigned s = static_cast<unsigned>(e.vars.size());
    if (s > kMaxPredicateArity) throw std::invalid_argument("equation arity too large for a clause table");
    for (std::size_t b = 0; b < (std::size_t{1} << s); ++b) {
      const auto parity = static_cast<std::uint8_t>(__builtin_popcountll(b) & 1);
      if (parity == e.rhs) continue;
      Predicate p;
      p.arity = s;
      p.truth_table.assign(std::size_t{1} << s, 1);
      p.truth_table[b] = 0;
      p.name = "forbid_";
      for (unsigned i = 0; i < s; ++i) p.name += ((b >> i) & 1) ? '1' : '0';
      const std::size_t idx = inst.intern(std::move(p));
      inst.constraints.push_back({idx, e.vars, e.weight});
    }
  }
  out.parameter_scale = Weight{1} << (system.arity_bound - 1);
  return out;
}

struct CspYesCertificate {
  Assignment assignment;
  Weight weight = 0;
};

struct CspKernel {
  BooleanCspInstance instance;
  Weight k = 0;                   // parameter for the kernel instance
  std::vector<Var> original_var;  // kernel variable -> input variable
};

using CspKernelResult = std::variant<CspYesCertificate, CspKernel>;

inline CspKernelResult kernelize_csp(const BooleanCspInstance& inst, Weight k) {
  auto lin_result = kernelize(csp_to_lin2(inst), k);
  if (auto* yes = std::get_if<Lin2YesCertificate>(&lin_result)) {
    const Weight w = eval_csp_weight(inst, yes->assignment);
    return CspYesCertificate{std::move(yes->assignment), w};
  }
  auto& kernel = std::get<Lin2Kernel>(lin_result);
  auto back = lin2_to_csp(kernel.system);
  return CspKernel{std::move(back.instance), k * back.parameter_scale, std::move(kernel.original_var)};
}

}  // namespace aboveavg
