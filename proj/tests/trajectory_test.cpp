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

#include "trajdp/trajectory.hpp"

#include <functional>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "test_support.hpp"

namespace trajdp {
namespace {

using testing::TempDir;

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected trajdp::Error";
  return ErrorKind::kIo;
}

TEST(LoadDbTest, SampleDatabaseWithDerivedUniverse) {
  TempDir dir;
  const auto path = dir.write("t2.txt", testing::kSampleText);
  std::ostringstream warn;
  const auto loaded = load_db(path, std::nullopt, &warn);
  EXPECT_EQ(loaded.db.size(), 8u);
  EXPECT_EQ(loaded.universe.size(), 4u);
  EXPECT_TRUE(loaded.universe_from_data);
  EXPECT_NE(warn.str().find("warning"), std::string::npos);
  // First-appearance order.
  EXPECT_EQ(loaded.universe.tokens(),
            (std::vector<std::string>{"L1", "L2", "L3", "L4"}));
  EXPECT_EQ(loaded.db.records, testing::sample_db().records);
}

TEST(LoadDbTest, EmptyFile) {
  TempDir dir;
  const auto data = dir.write("empty.txt", "");
  const auto uni = dir.write("u.txt", "A\nB\n");
  EXPECT_EQ(load_db(data, std::nullopt, nullptr).db.size(), 0u);
  EXPECT_EQ(load_db(data, std::nullopt, nullptr).universe.size(), 0u);
  const auto with_universe = load_db(data, uni, nullptr);
  EXPECT_EQ(with_universe.db.size(), 0u);
  EXPECT_EQ(with_universe.universe.size(), 2u);
}

TEST(LoadDbTest, RepeatedLocation) {
  TempDir dir;
  const auto loaded =
      load_db(dir.write("aa.txt", "A A\n"), dir.write("u.txt", "A\n"), nullptr);
  ASSERT_EQ(loaded.db.size(), 1u);
  EXPECT_EQ(loaded.db.records[0], (Trajectory{0, 0}));
  EXPECT_EQ(loaded.universe.size(), 1u);
  EXPECT_FALSE(loaded.universe_from_data);
}

TEST(LoadDbTest, TabsAndRunsOfSpaces) {
  TempDir dir;
  const auto loaded =
      load_db(dir.write("t.txt", "A\t B  \tC\n  B\n"), std::nullopt, nullptr);
  ASSERT_EQ(loaded.db.size(), 2u);
  EXPECT_EQ(loaded.db.records[0], (Trajectory{0, 1, 2}));
  EXPECT_EQ(loaded.db.records[1], (Trajectory{1}));
}

TEST(LoadDbTest, Errors) {
  TempDir dir;
  const auto uni = dir.write("u.txt", "A\n");
  EXPECT_EQ(kind_of([&] { load_db(dir.write("x.txt", "A B\n"), uni, nullptr); }),
            ErrorKind::kUniverseViolation);
  EXPECT_EQ(kind_of([&] {
              load_db(dir.write("blank.txt", "A\n   \nA\n"), std::nullopt, nullptr);
            }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] {
              load_db(dir.write("gap.txt", "A\n\nA\n"), std::nullopt, nullptr);
            }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([&] { load_db(dir.file("missing.txt"), std::nullopt, nullptr); }),
            ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] {
              load_db(dir.write("ok.txt", "A\n"), dir.file("nouni.txt"), nullptr);
            }),
            ErrorKind::kIo);
  EXPECT_EQ(kind_of([&] { load_universe(dir.write("dup.txt", "A\nA\n")); }),
            ErrorKind::kParse);
}

TEST(WriteDbTest, SampleDatabaseInInputOrder) {
  TempDir dir;
  const auto out = dir.file("out.txt");
  write_db(testing::sample_db(), testing::sample_universe(), out);
  EXPECT_EQ(testing::read_file(out), testing::kSampleText);
}

TEST(WriteDbTest, EmptyDatabaseGivesEmptyFile) {
  TempDir dir;
  const auto out = dir.file("out.txt");
  write_db(TrajectoryDb{}, testing::sample_universe(), out);
  EXPECT_EQ(testing::read_file(out), "");
}

TEST(WriteDbTest, DuplicatesKeptOnePerLine) {
  TempDir dir;
  const auto out = dir.file("out.txt");
  write_db(TrajectoryDb{{{0, 1}, {0, 1}, {0, 1}}}, testing::sample_universe(),
           out);
  EXPECT_EQ(testing::read_file(out), "L1 L2\nL1 L2\nL1 L2\n");
}

TEST(WriteDbTest, UnwritablePath) {
  TempDir dir;
  EXPECT_EQ(kind_of([&] {
              write_db(testing::sample_db(), testing::sample_universe(),
                       dir.file("no/such/dir/out.txt"));
            }),
            ErrorKind::kIo);
}

TEST(WriteDbTest, RoundTripPreservesMultisetAndIds) {
  std::mt19937_64 rng(11);
  TempDir dir;
  std::vector<std::string> tokens;
  for (int i = 0; i < 15; ++i) tokens.push_back("stop_" + std::to_string(i));
  const auto universe = LocationUniverse::from_tokens(tokens);
  const auto uni_path = dir.file("u.txt");
  write_universe(universe, uni_path);
  for (int trial = 0; trial < 50; ++trial) {
    const auto db = testing::random_db(rng, 60, 15, 9);
    const auto path = dir.file("rt.txt");
    write_db(db, universe, path);
    const auto back = load_db(path, uni_path, nullptr);
    EXPECT_EQ(testing::as_multiset(back.db), testing::as_multiset(db));
    EXPECT_EQ(back.universe, universe);
  }
}

TEST(LoadDbTest, InterningIsStableAcrossLoads) {
  TempDir dir;
  const auto path = dir.write("t.txt", "b a c\nc c a\nd\n");
  const auto first = load_db(path, std::nullopt, nullptr);
  const auto second = load_db(path, std::nullopt, nullptr);
  EXPECT_EQ(first.universe, second.universe);
  EXPECT_EQ(first.db.records, second.db.records);
}

TEST(IsPrefixTest, Examples) {
  const Trajectory t{0, 1, 3, 2};  // L1 L2 L4 L3
  EXPECT_TRUE(is_prefix(Trajectory{0, 1}, t));
  EXPECT_FALSE(is_prefix(Trajectory{0, 3}, t));
  EXPECT_TRUE(is_prefix(t, t));
  EXPECT_TRUE(is_prefix(Trajectory{}, t));
  EXPECT_FALSE(is_prefix(t, Trajectory{0, 1}));
}

TEST(IsPrefixTest, PartialOrderProperties) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(1, 4);
  std::uniform_int_distribution<LocationId> loc(0, 1);
  const auto random_traj = [&] {
    Trajectory t(len(rng));
    for (auto& x : t) x = loc(rng);
    return t;
  };
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_traj(), b = random_traj(), c = random_traj();
    EXPECT_TRUE(is_prefix(a, a));
    if (a.size() == b.size() && is_prefix(a, b)) EXPECT_EQ(a, b);
    if (is_prefix(a, b) && is_prefix(b, a)) EXPECT_EQ(a, b);
    if (is_prefix(a, b) && is_prefix(b, c)) EXPECT_TRUE(is_prefix(a, c));
  }
}

TEST(TimestampedTest, CompositeTokens) {
  LocationUniverse u;
  const std::vector<TimedLocation> a{{"L1", 1}, {"L2", 2}};
  const std::vector<TimedLocation> b{{"L1", 2}, {"L2", 3}};
  const auto ta = encode_timestamped(a, u);
  const auto tb = encode_timestamped(b, u);
  EXPECT_EQ(u.size(), 4u);
  EXPECT_EQ(u.token(ta[0]), "L1@1");
  EXPECT_EQ(u.token(ta[1]), "L2@2");
  EXPECT_NE(ta, tb);
}

TEST(TimestampedTest, SinglePairAndEqualTimes) {
  LocationUniverse u;
  const std::vector<TimedLocation> one{{"L1", 5}};
  EXPECT_EQ(encode_timestamped(one, u).size(), 1u);
  const std::vector<TimedLocation> same{{"L1", 5}, {"L1", 5}};
  EXPECT_EQ(encode_timestamped(same, u), (Trajectory{0, 0}));
}

TEST(TimestampedTest, DecreasingTimestampsRejected) {
  LocationUniverse u;
  const std::vector<TimedLocation> bad{{"L1", 2}, {"L2", 1}};
  EXPECT_EQ(kind_of([&] { encode_timestamped(bad, u); }),
            ErrorKind::kInvalidArgument);
}

TEST(TimestampedTest, ValidateFile) {
  LocationUniverse u;
  std::istringstream ok("a@1 b@2 b@2\nc@0\n");
  const auto db = read_db(ok, u, UnknownTokens::kIntern);
  EXPECT_NO_THROW(validate_timestamped(db, u));

  LocationUniverse u2;
  std::istringstream bad("a@3 b@2\n");
  const auto db2 = read_db(bad, u2, UnknownTokens::kIntern);
  EXPECT_EQ(kind_of([&] { validate_timestamped(db2, u2); }), ErrorKind::kParse);

  LocationUniverse u3;
  std::istringstream plain("a b\n");
  const auto db3 = read_db(plain, u3, UnknownTokens::kIntern);
  EXPECT_EQ(kind_of([&] { validate_timestamped(db3, u3); }), ErrorKind::kParse);
}

}  // namespace
}  // namespace trajdp
