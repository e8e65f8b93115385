#include <gtest/gtest.h>

#include <cmath>

#include "aboveavg/exact_search.hpp"
#include "aboveavg/perm_ordering.hpp"
#include "support/generators.hpp"

using namespace aboveavg;
using testsupport::Gen;

namespace {

using OC = OrderingConstraint;

OrderingInstance make(std::size_t n, std::vector<OC> cs) {
  OrderingInstance inst;
  inst.num_vars = n;
  inst.constraints = std::move(cs);
  return inst;
}

OrderingInstance directed_cycle(std::size_t n) {
  OrderingInstance inst;
  inst.num_vars = n;
  for (Var i = 0; i < n; ++i) inst.constraints.push_back(OC::binary(i, static_cast<Var>((i + 1) % n), 1));
  return inst;
}

PermPredicate betweenness() { return {"between", 3, {{1, 2, 3}, {3, 2, 1}}}; }

template <typename F>
void for_each_ordering(std::size_t n, F&& f) {
  std::vector<Var> seq(n);
  std::iota(seq.begin(), seq.end(), Var{0});
  do f(seq);
  while (std::next_permutation(seq.begin(), seq.end()));
}

template <typename F>
void for_each_bucketing(std::size_t n, unsigned t, F&& f) {
  const std::uint64_t per = std::uint64_t{1} << t;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= per;
  BucketAssignment b;
  b.t = t;
  b.bucket.assign(n, 0);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rest = code;
    for (std::size_t v = 0; v < n; ++v) {
      b.bucket[v] = static_cast<std::uint32_t>(rest % per);
      rest /= per;
    }
    f(b);
  }
}

std::vector<int> signs_of(const BucketAssignment& b) {
  std::vector<int> s;
  for (Var v = 0; v < b.bucket.size(); ++v)
    for (unsigned j = 0; j < b.t; ++j) s.push_back(b.component(v, j));
  return s;
}

Weight lifted_weight(const OrderingInstance& after, const std::vector<Var>& before_seq, std::size_t n) {
  // ordering of `after` induced by an ordering of the input variables
  std::vector<Var> dense(n, kNoVar);
  for (Var i = 0; i < after.source_var.size(); ++i) dense[after.source_var[i]] = i;
  std::vector<Var> seq;
  for (Var v : before_seq)
    if (dense[v] != kNoVar) seq.push_back(dense[v]);
  return testsupport::ordering_weight(after, seq);
}

}  // namespace

TEST(PermToOrdering, BetweennessExpandsToTwo) {
  PermCspInstance inst;
  inst.num_vars = 3;
  inst.predicates = {betweenness()};
  inst.constraints = {{0, {0, 1, 2}, 1}};
  const auto ord = perm_to_linear_ordering(inst);
  ASSERT_EQ(ord.constraints.size(), 2u);
  EXPECT_EQ(ord.constraints[0], OC::ternary(0, 1, 2, 1));
  EXPECT_EQ(ord.constraints[1], OC::ternary(2, 1, 0, 1));
}

TEST(PermToOrdering, FullPredicateSatisfiedExactlyOnce) {
  PermCspInstance inst;
  inst.num_vars = 3;
  PermPredicate all{"all", 3, {}};
  std::vector<std::uint8_t> p{1, 2, 3};
  do all.satisfying.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  inst.predicates = {all};
  inst.constraints = {{0, {2, 0, 1}, 1}};
  const auto ord = perm_to_linear_ordering(inst);
  EXPECT_EQ(ord.constraints.size(), 6u);
  for_each_ordering(3, [&](const std::vector<Var>& s) { EXPECT_EQ(testsupport::ordering_weight(ord, s), 1); });
}

TEST(PermToOrdering, PerOrderingWeightsAgree) {
  Gen g(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = g.perm(static_cast<std::size_t>(g.uniform(3, 6)), 8, 5);
    const auto ord = perm_to_linear_ordering(inst);
    EXPECT_EQ(rho_W(ord), rho_W(inst));
    for_each_ordering(inst.num_vars, [&](const std::vector<Var>& s) {
      ASSERT_EQ(testsupport::perm_weight(inst, s), testsupport::ordering_weight(ord, s));
      Ordering phi{s};
      ASSERT_EQ(eval_perm_weight(inst, phi), testsupport::perm_weight(inst, s));
    });
  }
}

TEST(Rules, Cancellation) {
  const auto r = apply_reduction_rules(make(2, {OC::binary(0, 1, 3), OC::binary(1, 0, 1)}));
  ASSERT_EQ(r.constraints.size(), 1u);
  EXPECT_EQ(r.constraints[0], OC::binary(0, 1, 2));
  EXPECT_EQ(r.weight_shift, 1);
  EXPECT_TRUE(r.irreducible);
}

TEST(Rules, EdgeReplacement) {
  // a=0, b=1, c=2: abc, bac, acb -> (a, c)
  const auto r =
      apply_reduction_rules(make(3, {OC::ternary(0, 1, 2, 1), OC::ternary(1, 0, 2, 1), OC::ternary(0, 2, 1, 1)}));
  ASSERT_EQ(r.num_vars, 2u);
  ASSERT_EQ(r.constraints.size(), 1u);
  EXPECT_EQ(r.source_var, (std::vector<Var>{0, 2}));
  EXPECT_EQ(r.constraints[0], OC::binary(0, 1, 1));
  EXPECT_EQ(r.weight_shift, 0);
}

TEST(Rules, CycleReplacement) {
  const auto before = make(3, {OC::ternary(0, 1, 2, 1), OC::ternary(1, 2, 0, 1), OC::ternary(2, 0, 1, 1)});
  const auto r = apply_reduction_rules(before);
  EXPECT_EQ(r.weight_shift, -1);
  ASSERT_EQ(r.constraints.size(), 3u);
  std::set<std::array<Var, 3>> got;
  for (const auto& c : r.constraints) {
    EXPECT_EQ(c.weight, 1);
    got.insert(c.vars);
  }
  EXPECT_EQ(got, (std::set<std::array<Var, 3>>{{0, 1, kNoVar}, {1, 2, kNoVar}, {2, 0, kNoVar}}));
  for_each_ordering(3, [&](const std::vector<Var>& s) {
    EXPECT_EQ(testsupport::ordering_weight(before, s), testsupport::ordering_weight(r, s) - 1);
  });
}

TEST(Rules, SoundOnRandomInstances) {
  Gen g(32);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(g.uniform(2, 7));
    const auto before = g.ordering(n, static_cast<std::size_t>(g.uniform(1, 16)), 4, 70);
    const auto r = apply_reduction_rules(before);
    EXPECT_TRUE(r.irreducible);
    EXPECT_TRUE(is_irreducible(r));
    EXPECT_TRUE(has_absent_pair_property(r));
    EXPECT_TRUE(representation_check(r).empty());
    EXPECT_EQ(rho_W(before), rho_W(r) + Rational(r.weight_shift));
    for_each_ordering(n, [&](const std::vector<Var>& s) {
      ASSERT_EQ(testsupport::ordering_weight(before, s), lifted_weight(r, s, n) + r.weight_shift);
    });
  }
}

TEST(Rho, Examples) {
  EXPECT_EQ(rho_W(make(3, {OC::ternary(0, 1, 2, 6)})), Rational(1));
  EXPECT_EQ(rho_W(directed_cycle(7)), Rational(7, 2));
  Gen g(33);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(g.uniform(3, 7));
    const auto inst = g.ordering(n, 10, 6);
    Weight sum = 0, count = 0;
    for_each_ordering(n, [&](const std::vector<Var>& s) {
      sum += testsupport::ordering_weight(inst, s);
      ++count;
    });
    EXPECT_EQ(rho_W(inst), Rational(sum, count));
  }
}

TEST(Payoff, Examples) {
  const std::array<std::uint32_t, 3> increasing{0, 1, 3}, same{2, 2, 2}, dips{0, 2, 1};
  EXPECT_EQ(bucket_payoff(increasing), Rational(1));
  EXPECT_EQ(bucket_payoff(same), Rational(1, 6));
  EXPECT_EQ(bucket_payoff(dips), Rational(0));
  const std::array<std::uint32_t, 3> pair_then{1, 1, 3};
  EXPECT_EQ(bucket_payoff(pair_then), Rational(1, 2));
}

// Subsets are 0-based: component j of tuple position p is p*t + j.
TEST(PayoffPolynomial, BinaryOneBit) {
  const auto g = payoff_polynomial(2, 1);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.constant_term(), Rational(1, 2));
  EXPECT_EQ(g.coefficient({0}), Rational(1, 4));
  EXPECT_EQ(g.coefficient({1}), Rational(-1, 4));
}

TEST(PayoffPolynomial, BinaryTwoBits) {
  const auto g = payoff_polynomial(2, 2);
  EXPECT_EQ(g.coefficient({0, 2, 3}), Rational(-2, 16));
}

TEST(PayoffPolynomial, TernaryTwoBits) {
  const auto g = payoff_polynomial(3, 2);
  EXPECT_EQ(g.coefficient({0, 2, 4, 5}), Rational(-2, 64));
  EXPECT_EQ(g.coefficient({0, 1, 2, 4}), Rational(-2, 64));
}

TEST(PayoffPolynomial, DenominatorsAndRoundTrip) {
  for (unsigned arity = 2; arity <= 3; ++arity)
    for (unsigned t = 1; t <= 3; ++t) {
      const auto g = payoff_polynomial(arity, t);
      const Weight bound = factorial(arity) << (arity * t);
      for (const auto& [m, c] : g.terms()) EXPECT_EQ(bound % c.den(), 0);
      EXPECT_EQ(g.constant_term(), Rational(1, factorial(arity)));
      const std::size_t n = arity;
      for_each_bucketing(n, t, [&](const BucketAssignment& b) {
        ASSERT_EQ(g.evaluate(signs_of(b)), bucket_payoff(b.bucket));
      });
    }
  EXPECT_THROW(payoff_polynomial(3, 5), std::invalid_argument);
  EXPECT_THROW(payoff_polynomial(4, 1), std::invalid_argument);
}

TEST(Aggregate, SingleConstraintEmbeds) {
  const auto inst = make(4, {OC::binary(3, 1, 2)});
  const auto g = aggregate_polynomial(inst, 2);
  const auto local = payoff_polynomial(2, 2).renamed(std::vector<Var>{6, 7, 2, 3}).scaled(Rational(2));
  EXPECT_EQ(g, local);
}

TEST(Aggregate, DirectedCycleIsConstantAtOneBit) {
  for (std::size_t n : {3u, 4u, 6u, 9u}) {
    const auto g = aggregate_polynomial(directed_cycle(n), 1);
    EXPECT_EQ(g.size(), 1u);
    EXPECT_EQ(g.constant_term(), Rational(static_cast<std::int64_t>(n), 2));
  }
}

TEST(Aggregate, EvaluationMatchesBucketWeight) {
  Gen g(34);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<std::size_t>(g.uniform(2, 5));
    const auto inst = g.ordering(n, 8, 5);
    const auto poly = aggregate_polynomial(inst, 2);
    for_each_bucketing(n, 2, [&](const BucketAssignment& b) {
      ASSERT_EQ(poly.evaluate(signs_of(b)), bucket_weight(inst, b));
    });
  }
}

TEST(Representation, Examples) {
  EXPECT_TRUE(representation_check(apply_reduction_rules(make(2, {OC::binary(0, 1, 1)}))).empty());
  EXPECT_TRUE(representation_check(apply_reduction_rules(make(3, {OC::ternary(0, 1, 2, 1)}))).empty());
  const auto tri = make(3, {OC::binary(0, 1, 1), OC::binary(1, 2, 1), OC::binary(2, 0, 1)});
  EXPECT_TRUE(is_irreducible(tri));
  EXPECT_TRUE(representation_check(tri).empty());
}

TEST(BuildLin2, SingleBinaryConstraint) {
  const auto f = build_lin2(make(2, {OC::binary(0, 1, 1)}));
  EXPECT_EQ(f.arity_bound, 6u);
  bool found = false;
  for (const auto& e : f.equations) {
    EXPECT_GT(e.weight, 0);
    if (e.vars == std::vector<Var>{0, 2, 3}) {
      found = true;
      EXPECT_EQ(e.weight, 48);
      EXPECT_EQ(e.rhs, 1);
    }
  }
  EXPECT_TRUE(found);
}

TEST(BuildLin2, CorrespondenceOnIrreducibleInstances) {
  Gen g(35);
  int tested = 0;
  while (tested < 50) {
    const auto n = static_cast<std::size_t>(g.uniform(2, 5));
    const auto r = apply_reduction_rules(g.ordering(n, static_cast<std::size_t>(g.uniform(1, 10)), 5));
    if (r.num_vars == 0) continue;
    ++tested;
    const auto f = build_lin2(r);
    const Rational rho = rho_W(r);
    for_each_bucketing(r.num_vars, 2, [&](const BucketAssignment& b) {
      const auto y = assignment_from_buckets(b);
      const Rational lhs = Rational(kOrderingScale) * (bucket_weight(r, b) - rho);
      ASSERT_EQ(lhs, Rational(2 * testsupport::lin2_weight(f, y) - f.total_weight()));
      const auto back = buckets_from_assignment(y, r.num_vars);
      ASSERT_EQ(back.bucket, b.bucket);
    });
  }
}

TEST(OrderingFromBuckets, Examples) {
  // distinct buckets: the bucket order itself
  const auto chain = make(4, {OC::binary(0, 1, 2), OC::ternary(3, 2, 1, 1)});
  BucketAssignment b{2, {3, 0, 2, 1}};
  const auto phi = ordering_from_buckets(chain, b);
  EXPECT_EQ(phi.sequence, (std::vector<Var>{1, 3, 2, 0}));
  EXPECT_EQ(Rational(testsupport::ordering_weight(chain, phi.sequence)), bucket_weight(chain, b));

  // with one bucket bit every bucketing of the cycle is worth n/2
  const auto cyc = directed_cycle(4);
  for_each_bucketing(4, 1, [&](const BucketAssignment& bb) {
    ASSERT_EQ(bucket_weight(cyc, bb), Rational(2));
    const auto p = ordering_from_buckets(cyc, bb);
    ASSERT_TRUE(p.is_permutation_of(4));
    ASSERT_GE(testsupport::ordering_weight(cyc, p.sequence), 2);
  });
}

TEST(OrderingFromBuckets, OneBucketBeatsAverage) {
  Gen g(36);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(g.uniform(2, 7));
    const auto inst = g.ordering(n, 12, 6);
    BucketAssignment b{2, std::vector<std::uint32_t>(n, 0)};
    const auto phi = ordering_from_buckets(inst, b);
    EXPECT_GE(Rational(testsupport::ordering_weight(inst, phi.sequence)), rho_W(inst));
  }
}

TEST(OrderingFromBuckets, ReachesCeilingOfBucketWeight) {
  Gen g(37);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = static_cast<std::size_t>(g.uniform(2, 5));
    const auto inst = g.ordering(n, 10, 6);
    for_each_bucketing(n, 2, [&](const BucketAssignment& b) {
      const auto phi = ordering_from_buckets(inst, b);
      ASSERT_TRUE(phi.is_permutation_of(n));
      ASSERT_GE(testsupport::ordering_weight(inst, phi.sequence), bucket_weight(inst, b).ceil());
      // respects the bucket order
      const auto pos = phi.positions();
      for (Var u = 0; u < n; ++u)
        for (Var v = 0; v < n; ++v)
          if (b.bucket[u] < b.bucket[v]) {
            ASSERT_LT(pos[u], pos[v]);
          }
    });
  }
}

TEST(SolveOrdering, DirectedCycleAnchors) {
  for (std::size_t n : {4u, 6u, 8u, 10u}) {
    const auto c = directed_cycle(n);
    const auto yes = solve_ordering_aa(c, static_cast<Weight>((n - 2) / 2));
    EXPECT_TRUE(yes.yes) << n;
    EXPECT_GE(testsupport::ordering_weight(c, yes.witness.sequence), static_cast<Weight>(n / 2 + (n - 2) / 2));
    const auto no = solve_ordering_aa(c, static_cast<Weight>(n / 2));
    EXPECT_FALSE(no.yes) << n;
    EXPECT_EQ(no.weight, static_cast<Weight>(n - 1));
  }
}

TEST(SolveOrdering, MatchesOracle) {
  Gen g(38);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(g.uniform(2, 7));
    const auto inst = g.ordering(n, static_cast<std::size_t>(g.uniform(1, 14)), 5, static_cast<int>(g.uniform(0, 100)));
    const Weight k = g.uniform(1, 4);
    OrderingRunStats stats;
    const auto v = solve_ordering_aa(inst, k, {}, &stats);
    const Weight best = testsupport::best_over_orderings(n, [&](const auto& s) { return testsupport::ordering_weight(inst, s); });
    EXPECT_EQ(v.yes, Rational(best) >= ordering_threshold(inst, k));
    ASSERT_TRUE(v.witness.is_permutation_of(n));
    EXPECT_EQ(testsupport::ordering_weight(inst, v.witness.sequence), v.weight);
    if (!v.yes) {
      EXPECT_EQ(v.weight, best);
    }
    EXPECT_TRUE(stats.unrepresented.empty());
  }
}

TEST(SolvePerm, BetweennessExamples) {
  PermCspInstance empty;
  empty.num_vars = 3;
  empty.predicates = {betweenness()};
  const auto v0 = solve_perm_aa(empty, 1);
  EXPECT_FALSE(v0.yes);
  EXPECT_EQ(v0.weight, 0);

  PermCspInstance all3 = empty;
  all3.constraints = {{0, {0, 1, 2}, 1}, {0, {1, 0, 2}, 1}, {0, {0, 2, 1}, 1}};
  EXPECT_EQ(rho_W(all3), Rational(1));
  for_each_ordering(3, [&](const std::vector<Var>& s) { EXPECT_EQ(testsupport::perm_weight(all3, s), 1); });
  const auto v1 = solve_perm_aa(all3, 1);
  EXPECT_FALSE(v1.yes);
  EXPECT_EQ(v1.weight, 1);
}

TEST(SolvePerm, RandomBetweennessMatchesOracle) {
  Gen g(39);
  for (int trial = 0; trial < 100; ++trial) {
    PermCspInstance inst;
    inst.num_vars = static_cast<std::size_t>(g.uniform(3, 6));
    inst.predicates = {betweenness()};
    const auto m = g.uniform(1, 8);
    for (int i = 0; i < m; ++i) inst.constraints.push_back({0, g.distinct(inst.num_vars, 3), g.uniform(1, 3)});
    const Weight k = g.uniform(1, 3);
    const auto v = solve_perm_aa(inst, k);
    const Weight best =
        testsupport::best_over_orderings(inst.num_vars, [&](const auto& s) { return testsupport::perm_weight(inst, s); });
    EXPECT_EQ(v.yes, Rational(best) >= rho_W(inst) + Rational(k));
    EXPECT_EQ(testsupport::perm_weight(inst, v.witness.sequence), v.weight);
  }
}

TEST(SolvePerm, MixedPredicatesMatchOracle) {
  Gen g(40);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = g.perm(static_cast<std::size_t>(g.uniform(2, 6)), static_cast<std::size_t>(g.uniform(1, 8)), 4);
    const Weight k = g.uniform(1, 4);
    const auto v = solve_perm_aa(inst, k);
    const Weight best =
        testsupport::best_over_orderings(inst.num_vars, [&](const auto& s) { return testsupport::perm_weight(inst, s); });
    EXPECT_EQ(v.yes, Rational(best) >= rho_W(inst) + Rational(k));
  }
}
