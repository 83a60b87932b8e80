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

#include "trajdp/synth.hpp"

#include <algorithm>
#include <numeric>

#include "gtest/gtest.h"
#include "test_support.hpp"
#include "trajdp/release.hpp"
#include "trajdp/utility.hpp"

namespace trajdp {
namespace {

double mean_length(const TrajectoryDb& db) {
  double total = 0;
  for (const auto& t : db.records) total += t.size();
  return total / db.size();
}

TEST(SynthTest, TenthScaleTransitShape) {
  const SynthConfig cfg;  // 120k records over 1012 locations
  const auto c = generate(cfg);
  EXPECT_EQ(c.db.size(), 120'000u);
  EXPECT_EQ(c.universe.size(), 1012u);
  EXPECT_NEAR(mean_length(c.db), 6.7, 0.05 * 6.7);
  EXPECT_LE(c.db.max_length(), 121u);
  const auto stats = release_stats(c.db);
  // Geometric lengths: length 1 is the most common.
  std::size_t mode = 0, best = 0;
  for (const auto& [len, n] : stats.length_histogram) {
    if (n > best) best = n, mode = len;
  }
  EXPECT_EQ(mode, 1u);
  EXPECT_TRUE(c.routes.empty());
}

TEST(SynthTest, UniformWithoutSkewOrRoutes) {
  SynthConfig cfg;
  cfg.locations = 10;
  cfg.records = 20'000;
  cfg.avg_len = 3.0;
  cfg.max_len = 20;
  cfg.zipf_skew = 0.0;
  const auto c = generate(cfg);
  std::vector<double> freq(10, 0);
  double total = 0;
  for (const auto& t : c.db.records) {
    for (auto loc : t) ++freq[loc], ++total;
  }
  // Pearson chi-square with 9 degrees of freedom; 27.88 is the 0.001 quantile.
  double chi2 = 0;
  for (double f : freq) chi2 += (f - total / 10) * (f - total / 10) / (total / 10);
  EXPECT_LT(chi2, 27.88);
}

TEST(SynthTest, DeterministicPerSeed) {
  SynthConfig cfg;
  cfg.records = 2000;
  cfg.planted_routes = 3;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  EXPECT_EQ(a.db.records, b.db.records);
  EXPECT_EQ(a.routes, b.routes);
  cfg.seed = 2;
  EXPECT_NE(generate(cfg).db.records, a.db.records);
}

TEST(SynthTest, PlantedRoutesAreRecoverable) {
  SynthConfig cfg;
  cfg.locations = 200;
  cfg.records = 20'000;
  cfg.planted_routes = 5;
  cfg.route_length = 3;
  cfg.route_fraction = 0.5;
  const auto c = generate(cfg);
  ASSERT_EQ(c.routes.size(), 5u);
  for (const auto& r : c.routes) {
    EXPECT_EQ(r.size(), 3u);
    EXPECT_EQ(std::set<LocationId>(r.begin(), r.end()).size(), 3u);
  }
  // Each route brings its own six shorter sub-patterns with it, and frequent
  // background locations fill the remaining slots of the margin.
  const std::size_t margin = 5 * 6 + 40;
  const auto top = mine_top_k(c.db, c.routes.size() + margin, 3);
  for (const auto& r : c.routes) {
    const bool found =
        std::any_of(top.patterns.begin(), top.patterns.end(),
                    [&](const SeqPattern& p) { return p.locations == r; });
    EXPECT_TRUE(found);
  }
}

TEST(SynthTest, InfeasibleConfigs) {
  SynthConfig cfg;
  cfg.avg_len = 0.5;
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.max_len = 5;  // below avg_len 6.7
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.locations = 0;
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.planted_routes = 2;
  cfg.route_length = 200;
  EXPECT_THROW(generate(cfg), Error);
  cfg = {};
  cfg.zipf_skew = -1;
  EXPECT_THROW(generate(cfg), Error);
}

TEST(SynthTest, EmptyCorpus) {
  SynthConfig cfg;
  cfg.records = 0;
  const auto c = generate(cfg);
  EXPECT_TRUE(c.db.empty());
  EXPECT_EQ(c.universe.size(), 1012u);
}

}  // namespace
}  // namespace trajdp
