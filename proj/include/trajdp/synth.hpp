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

// Synthetic transit-like trajectory corpora.
//
// Lengths are geometric with the requested mean, truncated at max_len by
// rejection. Locations are Zipf-distributed over a shuffled universe. A
// fraction of records embed one of a few planted routes (fixed location
// sequences) at a random offset; those routes are the ground truth for
// pattern-mining checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "trajdp/error.hpp"
#include "trajdp/random.hpp"
#include "trajdp/trajectory.hpp"

namespace trajdp {

struct SynthConfig {
  std::size_t locations = 1012;
  std::size_t records = 120'000;
  double avg_len = 6.7;
  std::size_t max_len = 121;
  std::size_t planted_routes = 0;
  std::size_t route_length = 3;
  double route_fraction = 0.3;  // share of records carrying a planted route
  double zipf_skew = 1.0;       // 0 = uniform
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  TrajectoryDb db;
  LocationUniverse universe;
  std::vector<Trajectory> routes;
};

inline void validate(const SynthConfig& c) {
  if (c.locations < 1) throw_invalid("need at least one location");
  if (!(c.avg_len >= 1.0)) throw_invalid("avg_len must be >= 1");
  if (static_cast<double>(c.max_len) < c.avg_len) {
    throw_invalid("max_len must be >= avg_len");
  }
  if (c.zipf_skew < 0.0) throw_invalid("zipf_skew must be >= 0");
  if (c.planted_routes > 0) {
    if (c.route_length < 1 || c.route_length > c.max_len) {
      throw_invalid("route_length must be in [1, max_len]");
    }
    if (c.route_length > c.locations) {
      throw_invalid("route_length exceeds the number of locations");
    }
    if (!(c.route_fraction >= 0.0 && c.route_fraction <= 1.0)) {
      throw_invalid("route_fraction must be in [0, 1]");
    }
  }
}

// Tokens L1..Ln.
inline LocationUniverse synthetic_universe(std::size_t n) {
  std::vector<std::string> tokens;
  tokens.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) tokens.push_back("L" + std::to_string(i));
  return LocationUniverse::from_tokens(std::move(tokens));
}

inline SynthCorpus generate(const SynthConfig& config) {
  validate(config);
  SynthCorpus out;
  out.universe = synthetic_universe(config.locations);
  RandomSource rng(config.seed);

  std::vector<LocationId> by_rank(config.locations);
  for (std::size_t i = 0; i < by_rank.size(); ++i) {
    by_rank[i] = static_cast<LocationId>(i);
  }
  std::shuffle(by_rank.begin(), by_rank.end(), rng);
  std::vector<double> weights(config.locations);
  for (std::size_t r = 0; r < weights.size(); ++r) {
    weights[r] = std::pow(static_cast<double>(r + 1), -config.zipf_skew);
  }
  std::discrete_distribution<std::size_t> rank(weights.begin(), weights.end());
  const auto location = [&] { return by_rank[rank(rng)]; };

  for (std::size_t i = 0; i < config.planted_routes; ++i) {
    std::vector<LocationId> pool = by_rank;
    std::shuffle(pool.begin(), pool.end(), rng);
    out.routes.emplace_back(pool.begin(), pool.begin() + config.route_length);
  }

  std::geometric_distribution<std::size_t> extra(1.0 / config.avg_len);
  const auto length = [&] {
    for (;;) {
      const std::size_t len = 1 + extra(rng);
      if (len <= config.max_len) return len;
    }
  };
  std::bernoulli_distribution planted(
      config.planted_routes > 0 ? config.route_fraction : 0.0);
  std::uniform_int_distribution<std::size_t> which(
      0, config.planted_routes > 0 ? config.planted_routes - 1 : 0);

  out.db.records.reserve(config.records);
  for (std::size_t i = 0; i < config.records; ++i) {
    std::size_t len = length();
    Trajectory t;
    if (planted(rng)) {
      const auto& route = out.routes[which(rng)];
      len = std::max(len, route.size());
      std::uniform_int_distribution<std::size_t> offset(0, len - route.size());
      const std::size_t at = offset(rng);
      t.reserve(len);
      for (std::size_t j = 0; j < at; ++j) t.push_back(location());
      t.insert(t.end(), route.begin(), route.end());
      while (t.size() < len) t.push_back(location());
    } else {
      t.reserve(len);
      for (std::size_t j = 0; j < len; ++j) t.push_back(location());
    }
    out.db.records.push_back(std::move(t));
  }
  return out;
}

}  // namespace trajdp
