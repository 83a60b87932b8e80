// Copyright 2026 The trajdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajdp/inference.hpp"

#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "trajdp/synth.hpp"

namespace trajdp {
namespace {

using Seq = std::vector<double>;

void expect_near(const Seq& a, const Seq& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << i;
}

Seq random_seq(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 6);
  std::uniform_real_distribution<double> val(-10, 10);
  Seq s(len(rng));
  for (auto& x : s) x = val(rng);
  return s;
}

TEST(IsotonicTest, Examples) {
  EXPECT_EQ(isotonic_fit(Seq{5, 3}), (Seq{4, 4}));
  EXPECT_EQ(isotonic_fit(Seq{3, 1, 4}), (Seq{2, 2, 4}));
  EXPECT_EQ(isotonic_fit(Seq{1, 2, 3}), (Seq{1, 2, 3}));
  EXPECT_EQ(isotonic_fit(Seq{7}), (Seq{7}));
  EXPECT_TRUE(isotonic_fit(Seq{}).empty());
  expect_near(isotonic_fit_min_max(Seq{5, 3}), Seq{4, 4}, 1e-12);
  expect_near(isotonic_fit_max_min(Seq{3, 1, 4}), Seq{2, 2, 4}, 1e-12);
}

TEST(IsotonicTest, AllFormsMatchExhaustiveOracle) {
  std::mt19937_64 rng(2026);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_seq(rng);
    const auto oracle = testing::brute_isotonic(s);
    expect_near(isotonic_fit(s), oracle, 1e-6);
    expect_near(isotonic_fit_min_max(s), oracle, 1e-6);
    expect_near(isotonic_fit_max_min(s), oracle, 1e-6);
  }
}

TEST(IsotonicTest, LowerAndUpperFormsAgree) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_seq(rng);
    expect_near(isotonic_fit_min_max(s), isotonic_fit_max_min(s), 1e-9);
  }
}

TEST(IsotonicTest, MonotoneAndIdempotent) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto fit = isotonic_fit(random_seq(rng));
    for (std::size_t i = 1; i < fit.size(); ++i) EXPECT_LE(fit[i - 1], fit[i]);
    expect_near(isotonic_fit(fit), fit, 1e-12);
  }
}

// Random small trees: the shape of an exact prefix tree with arbitrary counts.
NoisyPrefixTree random_tree(std::mt19937_64& rng) {
  static const auto universe = LocationUniverse::from_tokens({"a", "b", "c"});
  std::uniform_real_distribution<double> val(-10, 10);
  for (;;) {
    auto tree = build_exact_tree(testing::random_db(rng, 8, 3, 4), universe);
    if (tree.size() > 30) continue;
    for (NodeId id = 1; id < tree.size(); ++id) tree.node(id).noisy_count = val(rng);
    return tree;
  }
}

TEST(ConsolidateTest, ChainEqualsIsotonicFit) {
  const auto universe = LocationUniverse::from_tokens({"a"});
  auto tree = build_exact_tree(TrajectoryDb{{{0, 0, 0}}}, universe);
  ASSERT_EQ(tree.size(), 4u);
  tree.node(1).noisy_count = 3;  // root-first: 3, 4, 1
  tree.node(2).noisy_count = 4;
  tree.node(3).noisy_count = 1;
  consolidate(tree);
  // Leaf-first sequence 1, 4, 3 fits to 1, 3.5, 3.5.
  EXPECT_DOUBLE_EQ(tree.node(3).consolidated, 1.0);
  EXPECT_DOUBLE_EQ(tree.node(2).consolidated, 3.5);
  EXPECT_DOUBLE_EQ(tree.node(1).consolidated, 3.5);
}

TEST(ConsolidateTest, MatchesPathEnumerationOracle) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    auto tree = random_tree(rng);
    consolidate(tree);
    const auto oracle = testing::brute_consolidate(tree);
    for (NodeId id = 1; id < tree.size(); ++id) {
      EXPECT_NEAR(tree.node(id).consolidated, oracle[id], 1e-9);
    }
  }
}

TEST(ConsolidateTest, ThreadCountDoesNotMatter) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    auto a = random_tree(rng);
    auto b = a;
    consolidate(a, 1);
    consolidate(b, 4);
    for (NodeId id = 1; id < a.size(); ++id) {
      EXPECT_EQ(a.node(id).consolidated, b.node(id).consolidated);
    }
  }
}

// Two leaves under one level-1 node.
NoisyPrefixTree fork(double parent, double left, double right) {
  const auto universe = LocationUniverse::from_tokens({"A", "B", "C"});
  auto tree = build_exact_tree(TrajectoryDb{{{0, 1}, {0, 2}}}, universe);
  tree.node(1).consolidated = parent;
  tree.node(2).consolidated = left;
  tree.node(3).consolidated = right;
  return tree;
}

TEST(ConsistentTest, DeficitSharedEqually) {
  auto tree = fork(10, 6, 8);
  consistent_estimates(tree);
  EXPECT_DOUBLE_EQ(tree.node(1).consistent, 10);
  EXPECT_DOUBLE_EQ(tree.node(2).consistent, 4);
  EXPECT_DOUBLE_EQ(tree.node(3).consistent, 6);
}

TEST(ConsistentTest, SlackLeavesChildrenUnchanged) {
  auto tree = fork(10, 3, 4);
  consistent_estimates(tree);
  EXPECT_DOUBLE_EQ(tree.node(2).consistent, 3);
  EXPECT_DOUBLE_EQ(tree.node(3).consistent, 4);
}

TEST(ConsistentTest, SumConstraintAndNeverAboveConsolidated) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    auto tree = random_tree(rng);
    run_inference(tree);
    EXPECT_EQ(sum_constraint_violations(tree, 1e-9), 0u);
    for (NodeId id = 1; id < tree.size(); ++id) {
      EXPECT_LE(tree.node(id).consistent, tree.node(id).consolidated);
    }
  }
}

TEST(ConsistentTest, SumConstraintHoldsOnLargeNoisyTrees) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SynthConfig cfg;
    cfg.records = 20000;
    cfg.locations = 300;
    cfg.seed = seed;
    const auto corpus = generate(cfg);
    auto tree = build_noisy_tree(corpus.db, corpus.universe,
                                 PrivacyParams::create(1.0, 12), seed);
    run_inference(tree);
    // No slack at all, not just within 1e-9.
    EXPECT_EQ(sum_constraint_violations(tree, 0.0), 0u);
  }
}

TEST(InferenceTest, ExactTreeIsAFixedPoint) {
  auto tree = build_exact_tree(testing::sample_db(), testing::sample_universe());
  run_inference(tree);
  for (NodeId id = 1; id < tree.size(); ++id) {
    EXPECT_DOUBLE_EQ(tree.node(id).consolidated, tree.node(id).noisy_count);
    EXPECT_DOUBLE_EQ(tree.node(id).consistent, tree.node(id).noisy_count);
  }
  EXPECT_EQ(path_constraint_violations(tree), 0u);
}

}  // namespace
}  // namespace trajdp
