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

// End-to-end sanitization: noisy prefix tree, constrained inference, release.

#pragma once

#include <chrono>
#include <cstdint>

#include "trajdp/inference.hpp"
#include "trajdp/prefix_tree.hpp"
#include "trajdp/privacy.hpp"
#include "trajdp/release.hpp"
#include "trajdp/trajectory.hpp"

namespace trajdp {

struct SanitizeOptions {
  double epsilon = 1.0;
  int height = 12;
  double theta_multiplier = kDefaultThetaMultiplier;
  std::uint64_t seed = 0;
  bool expand_empty = false;
  unsigned threads = 1;
};

struct SanitizeRun {
  NoisyPrefixTree tree;  // counts, consolidated and consistent estimates
  double build_seconds = 0.0;
  double inference_seconds = 0.0;
  std::size_t path_violations = 0;  // diagnostic only
};

// Builds the noisy tree and runs inference, so either release variant can be
// drawn from the same randomness.
inline SanitizeRun sanitize_tree(const TrajectoryDb& db,
                                 const LocationUniverse& universe,
                                 const SanitizeOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const auto params =
      PrivacyParams::create(opts.epsilon, opts.height, opts.theta_multiplier);
  NoisyTreeOptions tree_opts;
  tree_opts.expand_empty = opts.expand_empty;
  tree_opts.threads = opts.threads;

  SanitizeRun run;
  const auto t0 = Clock::now();
  run.tree = build_noisy_tree(db, universe, params, opts.seed, tree_opts);
  const auto t1 = Clock::now();
  run_inference(run.tree, opts.threads);
  const auto t2 = Clock::now();
  run.build_seconds = std::chrono::duration<double>(t1 - t0).count();
  run.inference_seconds = std::chrono::duration<double>(t2 - t1).count();
  run.path_violations = path_constraint_violations(run.tree);
  return run;
}

inline TrajectoryDb sanitize(const TrajectoryDb& db,
                             const LocationUniverse& universe,
                             const SanitizeOptions& opts, Variant variant) {
  return generate_release(sanitize_tree(db, universe, opts).tree, variant);
}

}  // namespace trajdp
