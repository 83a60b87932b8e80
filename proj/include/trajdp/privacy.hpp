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

// Laplace-mechanism primitives and per-level budget bookkeeping for the noisy
// prefix tree.
//
// The total budget is split uniformly over the h tree levels. Nodes of one
// level hold disjoint trajectory sets, so a level costs its share once
// (parallel composition); levels add up (sequential composition).

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "trajdp/error.hpp"
#include "trajdp/random.hpp"

namespace trajdp {

inline constexpr double kDefaultThetaMultiplier = 2.0;

struct PrivacyParams {
  double epsilon = 1.0;
  int height = 12;
  double theta_multiplier = kDefaultThetaMultiplier;
  double per_level = 1.0 / 12;  // epsilon / height
  double threshold = 0.0;       // theta_multiplier * sqrt(2) / per_level
  double pass_prob = 0.0;       // exp(-per_level * threshold) / 2

  // Throws kInvalidArgument unless epsilon > 0, height >= 1 and
  // theta_multiplier > 0.
  static PrivacyParams create(double epsilon, int height,
                              double theta_multiplier = kDefaultThetaMultiplier) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw_invalid("epsilon must be positive and finite");
    }
    if (height < 1) throw_invalid("height must be at least 1");
    if (!(theta_multiplier > 0.0) || !std::isfinite(theta_multiplier)) {
      throw_invalid("threshold multiplier must be positive and finite");
    }
    PrivacyParams p;
    p.epsilon = epsilon;
    p.height = height;
    p.theta_multiplier = theta_multiplier;
    p.per_level = epsilon / height;
    // The Laplace(1/per_level) standard deviation is sqrt(2)/per_level.
    p.threshold = theta_multiplier * std::sqrt(2.0) / p.per_level;
    p.pass_prob = std::exp(-p.per_level * p.threshold) / 2.0;
    return p;
  }

  // Count queries have sensitivity 1.
  double laplace_scale() const { return 1.0 / per_level; }
};

// Laplace(scale) by inverse transform: u uniform in (-1/2, 1/2),
// X = -scale * sign(u) * ln(1 - 2|u|).
inline double sample_laplace(double scale, RandomSource& rng) {
  if (!(scale > 0.0)) throw_invalid("Laplace scale must be positive");
  const double u = rng.uniform_open() - 0.5;
  const double mag = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -mag : mag;
}

inline double laplace_noisy_count(std::uint64_t true_count, double scale,
                                  RandomSource& rng) {
  return static_cast<double>(true_count) + sample_laplace(scale, rng);
}

// Number of empty candidates (out of m) whose Laplace-noised zero count
// reaches the threshold: Binomial(m, pass_prob).
inline std::uint64_t sample_pass_count(std::uint64_t m,
                                       const PrivacyParams& params,
                                       RandomSource& rng) {
  if (m == 0) return 0;
  std::binomial_distribution<std::uint64_t> dist(m, params.pass_prob);
  return dist(rng);
}

// Inverse of P(x) = 1 - exp(per_level * (threshold - x)) on x >= threshold.
// `u` must lie in [0, 1).
inline double passing_noisy_count_at(double u, const PrivacyParams& params) {
  return params.threshold - std::log1p(-u) / params.per_level;
}

// Noisy count of an empty candidate conditioned on passing the threshold.
inline double sample_passing_noisy_count(const PrivacyParams& params,
                                         RandomSource& rng) {
  return passing_noisy_count_at(rng.uniform(), params);
}

// Noise policies for the tree builder. LaplaceNoise is the mechanism;
// ZeroNoise exists for noise-free structural tests.
struct LaplaceNoise {
  static constexpr bool kIsPrivate = true;
  double operator()(std::uint64_t true_count, double scale,
                    RandomSource& rng) const {
    return laplace_noisy_count(true_count, scale, rng);
  }
};

struct ZeroNoise {
  static constexpr bool kIsPrivate = false;
  double operator()(std::uint64_t true_count, double /*scale*/,
                    RandomSource& /*rng*/) const {
    return static_cast<double>(true_count);
  }
};

struct LevelCharge {
  int level = 0;            // 1-based tree depth
  double epsilon = 0.0;     // budget spent on this level
  std::size_t frontier = 0;  // nodes whose children were queried
};

// Records the budget spent per tree level.
class BudgetLedger {
 public:
  BudgetLedger() = default;
  explicit BudgetLedger(const PrivacyParams& params)
      : total_(params.epsilon), height_(params.height),
        per_level_(params.per_level) {}

  void charge(int level, std::size_t frontier) {
    if (level < 1 || level > height_) {
      throw_invalid("level " + std::to_string(level) + " outside [1, " +
                    std::to_string(height_) + "]");
    }
    if (!charges_.empty() && charges_.back().level >= level) {
      throw_invalid("levels must be charged in increasing order");
    }
    charges_.push_back({level, per_level_, frontier});
  }

  const std::vector<LevelCharge>& charges() const { return charges_; }
  int height() const { return height_; }
  double total() const { return total_; }
  double per_level() const { return per_level_; }

  // Spent budget as a fraction of the total. Counting levels keeps the
  // arithmetic exact: a fully charged ledger reports exactly `total`.
  double spent() const {
    if (static_cast<int>(charges_.size()) == height_) return total_;
    return total_ * (static_cast<double>(charges_.size()) / height_);
  }

  // Every level 1..h charged exactly once at the uniform share.
  bool complete() const {
    if (static_cast<int>(charges_.size()) != height_) return false;
    for (int i = 0; i < height_; ++i) {
      if (charges_[i].level != i + 1 || charges_[i].epsilon != per_level_) {
        return false;
      }
    }
    return true;
  }

 private:
  double total_ = 0.0;
  int height_ = 0;
  double per_level_ = 0.0;
  std::vector<LevelCharge> charges_;
};

// Planned assignment: every level 1..h gets epsilon / h.
inline std::vector<LevelCharge> budget_ledger(const PrivacyParams& params) {
  std::vector<LevelCharge> plan;
  plan.reserve(params.height);
  for (int i = 1; i <= params.height; ++i) plan.push_back({i, params.per_level, 0});
  return plan;
}

}  // namespace trajdp
