#include <gtest/gtest.h>

#include <variant>

#include "aboveavg/exact_search.hpp"
#include "aboveavg/lin2.hpp"
#include "support/generators.hpp"

using namespace aboveavg;
using testsupport::Gen;

namespace {

Lin2System system_of(std::size_t n, unsigned c, std::vector<Lin2Equation> eqs) {
  Lin2System s;
  s.num_vars = n;
  s.arity_bound = c;
  s.equations = std::move(eqs);
  return s;
}

}  // namespace

TEST(Reduce, ComplementaryPairKeepsHeavierDifference) {
  const auto r = reduce_system(system_of(2, 2, {make_equation({0, 1}, 0, 3), make_equation({0, 1}, 1, 1)}));
  ASSERT_EQ(r.equations.size(), 1u);
  EXPECT_EQ(r.equations[0], make_equation({0, 1}, 0, 2));
  EXPECT_EQ(r.offset, 1);
  EXPECT_TRUE(r.reduced);
}

TEST(Reduce, IdenticalEquationsMerge) {
  const auto r = reduce_system(system_of(2, 2, {make_equation({0, 1}, 0, 2), make_equation({1, 0}, 0, 5)}));
  ASSERT_EQ(r.equations.size(), 1u);
  EXPECT_EQ(r.equations[0].weight, 7);
  EXPECT_EQ(r.offset, 0);
}

TEST(Reduce, TieRemovesBoth) {
  const auto r = reduce_system(system_of(2, 2, {make_equation({0, 1}, 0, 4), make_equation({0, 1}, 1, 4)}));
  EXPECT_TRUE(r.equations.empty());
  EXPECT_EQ(r.offset, 4);
  EXPECT_EQ(r.original_total_weight(), 8);
}

TEST(Reduce, EveryAssignmentShiftsByOffset) {
  Gen g(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = g.lin2(6, 20, 3, 5);
    const auto r = reduce_system(s);
    EXPECT_EQ(r.original_total_weight(), s.total_weight());
    for (std::uint64_t mask = 0; mask < 64; ++mask) {
      const auto a = testsupport::from_mask(mask, 6);
      EXPECT_EQ(testsupport::lin2_weight(s, a), testsupport::lin2_weight(r, a) + r.offset);
      EXPECT_EQ(eval_weight(r, a, Units::original), testsupport::lin2_weight(s, a));
    }
  }
}

TEST(Eval, Examples) {
  EXPECT_EQ(eval_weight(system_of(1, 1, {make_equation({0}, 0, 7)}), Assignment(std::vector<std::uint8_t>{0})), 7);
  EXPECT_EQ(eval_weight(system_of(2, 2, {make_equation({0, 1}, 1, 3)}), Assignment(std::vector<std::uint8_t>{1, 1})),
            0);
  Gen g(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = g.lin2(9, 15, 4, 9);
    const auto a = testsupport::from_mask(static_cast<std::uint64_t>(g.uniform(0, 511)), 9);
    EXPECT_EQ(eval_weight(s, a), testsupport::lin2_weight(s, a));
  }
}

TEST(Eval, LengthMismatchThrows) {
  EXPECT_THROW(eval_weight(system_of(2, 2, {make_equation({0, 1}, 1, 3)}), Assignment(1)), std::invalid_argument);
}

TEST(Collections, HandTracedGreedy) {
  auto s = system_of(7, 3,
                     {make_equation({0, 1, 2}, 0, 1), make_equation({3, 4, 5}, 1, 1), make_equation({0, 3, 6}, 0, 1)});
  s.reduced = true;
  const auto c = build_collections(s);
  EXPECT_EQ(c.layer(3).equations, (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(c.layer(2).equations.empty());
  EXPECT_EQ(c.layer(1).equations, (std::vector<std::size_t>{2}));
  EXPECT_EQ(c.layer(1).fresh_vars[0], (std::vector<Var>{6}));
}

TEST(Collections, SingleUnitEquationAndEmpty) {
  auto s = reduce_system(system_of(1, 2, {make_equation({0}, 0, 1)}));
  auto c = build_collections(s);
  EXPECT_TRUE(c.layer(2).equations.empty());
  EXPECT_EQ(c.layer(1).equations.size(), 1u);

  auto empty = reduce_system(system_of(4, 3, {}));
  for (const auto& l : build_collections(empty).layers) EXPECT_TRUE(l.equations.empty());
}

// Every equation outside S_c..S_j has fewer than j variables outside the
// union of those layers, and appending it to S_j raises the GF(2) rank.
TEST(Collections, LayerPropertiesOnRandomSystems) {
  Gen g(13);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned c = static_cast<unsigned>(g.uniform(2, 4));
    const auto s = reduce_system(g.lin2(static_cast<std::size_t>(g.uniform(4, 14)), 30, c, 8));
    const auto col = build_collections(s);
    std::vector<std::uint8_t> in_layers(s.equations.size(), 0);
    std::vector<std::uint8_t> covered(s.num_vars, 0);
    for (unsigned j = c; j >= 1; --j) {
      const auto& layer = col.layer(j);
      std::vector<std::uint8_t> fresh_seen(s.num_vars, 0);
      Weight w = 0;
      for (std::size_t t = 0; t < layer.equations.size(); ++t) {
        const auto& e = s.equations[layer.equations[t]];
        w += e.weight;
        EXPECT_EQ(layer.fresh_vars[t].size(), j);
        for (Var v : layer.fresh_vars[t]) {
          EXPECT_FALSE(covered[v]);
          EXPECT_FALSE(fresh_seen[v]);
          fresh_seen[v] = 1;
        }
        in_layers[layer.equations[t]] = 1;
      }
      EXPECT_EQ(w, layer.weight);
      for (std::size_t i : layer.equations)
        for (Var v : s.equations[i].vars) covered[v] = 1;
      // maximality: no leftover equation could still join S_j with j fresh vars
      for (std::size_t i = 0; i < s.equations.size(); ++i) {
        if (in_layers[i]) continue;
        std::size_t outside = 0;
        for (Var v : s.equations[i].vars) outside += !covered[v];
        EXPECT_LT(outside, j);
      }
      if (layer.equations.empty()) continue;
      std::vector<std::vector<Var>> rows;
      for (std::size_t i : layer.equations) rows.push_back(s.equations[i].vars);
      const std::size_t base = testsupport::gf2_rank(rows, s.num_vars);
      EXPECT_EQ(base, rows.size());
      for (std::size_t i = 0; i < s.equations.size(); ++i) {
        if (std::find(layer.equations.begin(), layer.equations.end(), i) != layer.equations.end()) continue;
        auto extended = rows;
        extended.push_back(s.equations[i].vars);
        EXPECT_EQ(testsupport::gf2_rank(extended, s.num_vars), base + 1);
      }
    }
  }
}

TEST(Witness, ForcedUnitEquation) {
  auto s = reduce_system(system_of(1, 2, {make_equation({0}, 0, 4)}));
  const auto col = build_collections(s);
  const auto a = assignment_above_average(s, col, 1);
  EXPECT_EQ(a[0], 0);
  EXPECT_EQ(eval_weight(s, a), 4);
}

TEST(Witness, EmptyLayerRejected) {
  auto s = reduce_system(system_of(2, 2, {make_equation({0}, 0, 4)}));
  EXPECT_THROW(assignment_above_average(s, build_collections(s), 2), std::invalid_argument);
}

TEST(Witness, SatisfiesLayerAndBeatsBound) {
  Gen g(14);
  for (int trial = 0; trial < 300; ++trial) {
    const unsigned c = static_cast<unsigned>(g.uniform(2, 5));
    const auto s = reduce_system(g.lin2(static_cast<std::size_t>(g.uniform(3, 16)), 40, c, 8));
    const auto col = build_collections(s);
    for (unsigned j = 1; j <= c; ++j) {
      const auto& layer = col.layer(j);
      if (layer.equations.empty()) continue;
      const auto a = assignment_above_average(s, col, j);
      for (std::size_t i : layer.equations) EXPECT_TRUE(satisfies(s.equations[i], a));
      EXPECT_GE(2 * testsupport::lin2_weight(s, a), s.total_weight() + layer.weight);
    }
  }
}

TEST(Exhaustive, Examples) {
  auto unit = reduce_system(system_of(1, 1, {make_equation({0}, 1, 5)}));
  const auto opt = exhaustive_solve(unit);
  EXPECT_EQ(opt.assignment[0], 1);
  EXPECT_EQ(opt.weight, 5);

  const auto raw = system_of(2, 2, {make_equation({0, 1}, 0, 2), make_equation({0, 1}, 1, 3)});
  EXPECT_THROW(exhaustive_solve(raw), std::invalid_argument);
  const auto r = reduce_system(raw);
  ASSERT_EQ(r.equations.size(), 1u);
  EXPECT_EQ(r.equations[0], make_equation({0, 1}, 1, 1));
  EXPECT_EQ(r.offset, 2);
  EXPECT_EQ(exhaustive_solve(r).weight + r.offset, 3);
  EXPECT_EQ(testsupport::best_lin2(raw), 3);
}

TEST(Exhaustive, MatchesOracle) {
  Gen g(15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = reduce_system(g.lin2(8, 10, 3, 6));
    const auto opt = exhaustive_solve(s);
    const auto oracle = brute_force_lin2(s);
    EXPECT_EQ(opt.weight, oracle.weight);
    EXPECT_EQ(opt.assignment, oracle.assignment);
    EXPECT_EQ(testsupport::lin2_weight(s, opt.assignment), opt.weight);
    EXPECT_EQ(opt.weight, testsupport::best_lin2(s));
  }
}

TEST(Exhaustive, GuardNamesVariableCount) {
  Gen g(16);
  const auto s = reduce_system(g.lin2(12, 30, 3, 3));
  try {
    exhaustive_solve(s, 4);
    FAIL() << "guard not enforced";
  } catch (const ResourceGuardError& e) {
    EXPECT_EQ(e.guard(), 4u);
    EXPECT_EQ(e.variables(), s.occurring_vars().size());
  }
}

TEST(SolveAA, OneEquation) {
  const auto v = solve_aa(system_of(2, 2, {make_equation({0, 1}, 1, 1)}), 1);
  EXPECT_TRUE(v.yes);
  EXPECT_EQ(v.weight, 1);
  EXPECT_EQ(v.witness[0] ^ v.witness[1], 1);
}

TEST(SolveAA, AllRightHandSidesOnTwoPairs) {
  // Each pair is satisfied exactly once by every assignment: optimum = W/2.
  const auto s = system_of(4, 2,
                           {make_equation({0, 1}, 0, 2), make_equation({0, 1}, 1, 2), make_equation({2, 3}, 0, 2),
                            make_equation({2, 3}, 1, 2)});
  EXPECT_EQ(testsupport::best_lin2(s), 4);
  EXPECT_FALSE(solve_aa(s, 1).yes);
  EXPECT_EQ(solve_aa(s, 1).weight, 4);
}

TEST(SolveAA, RejectsNonPositiveK) {
  EXPECT_THROW(solve_aa(system_of(1, 1, {}), 0), std::invalid_argument);
}

TEST(SolveAA, MatchesOracleAndWitnessClearsThreshold) {
  Gen g(17);
  for (int trial = 0; trial < 500; ++trial) {
    const unsigned c = static_cast<unsigned>(g.uniform(2, 4));
    const auto n = static_cast<std::size_t>(g.uniform(2, 14));
    const auto s = g.lin2(n, static_cast<std::size_t>(g.uniform(1, 30)), c, 8);
    const Weight k = g.uniform(1, 6);
    const auto v = solve_aa(s, k);
    const Weight best = brute_force_lin2(s).weight;
    EXPECT_EQ(v.yes, 2 * best >= s.total_weight() + k);
    if (v.yes) {
      EXPECT_EQ(testsupport::lin2_weight(s, v.witness), v.weight);
      EXPECT_GE(2 * v.weight, s.total_weight() + k);
    } else {
      EXPECT_EQ(v.weight, best);
    }
  }
}

TEST(Kernel, EmptySystemGivesEmptyKernel) {
  const auto r = kernelize(system_of(3, 2, {}), 1);
  ASSERT_TRUE(std::holds_alternative<Lin2Kernel>(r));
  EXPECT_TRUE(std::get<Lin2Kernel>(r).system.equations.empty());
}

TEST(Kernel, HeavyTopLayerGivesCertificate) {
  const auto s = system_of(3, 3, {make_equation({0, 1, 2}, 1, 9)});
  const auto r = kernelize(s, 3);
  ASSERT_TRUE(std::holds_alternative<Lin2YesCertificate>(r));
  const auto& cert = std::get<Lin2YesCertificate>(r);
  EXPECT_EQ(testsupport::lin2_weight(s, cert.assignment), 9);
}

TEST(Kernel, BoundAndEquivalence) {
  Gen g(18);
  int kernels = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const unsigned c = static_cast<unsigned>(g.uniform(2, 4));
    const auto s = g.lin2(static_cast<std::size_t>(g.uniform(3, 12)), static_cast<std::size_t>(g.uniform(1, 25)), c, 8);
    const Weight k = g.uniform(1, 6);
    const auto r = kernelize(s, k);
    const Weight best = testsupport::best_lin2(s);
    const bool expected = 2 * best >= s.total_weight() + k;
    if (const auto* cert = std::get_if<Lin2YesCertificate>(&r)) {
      EXPECT_TRUE(expected);
      EXPECT_GE(2 * testsupport::lin2_weight(s, cert->assignment), s.total_weight() + k);
      continue;
    }
    ++kernels;
    const auto& kern = std::get<Lin2Kernel>(r);
    EXPECT_LE(static_cast<Weight>(kern.system.occurring_vars().size()), lin2_kernel_bound(c, k));
    EXPECT_EQ(kern.system.num_vars, kern.original_var.size());
    // Kernel answer in its own units, offset carried, matches the input.
    const Weight kbest = testsupport::best_lin2(kern.system) + kern.system.offset;
    EXPECT_EQ(kbest, best);
    EXPECT_EQ(kern.system.original_total_weight(), s.total_weight());
    const auto lifted = lift_kernel_assignment(kern, exhaustive_solve(kern.system).assignment, s.num_vars);
    EXPECT_EQ(testsupport::lin2_weight(s, lifted), best);
  }
  EXPECT_GT(kernels, 20);
}
