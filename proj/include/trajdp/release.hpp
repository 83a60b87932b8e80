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

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "trajdp/error.hpp"
#include "trajdp/prefix_tree.hpp"
#include "trajdp/trajectory.hpp"

namespace trajdp {

// Basic releases from the raw noisy counts; Full from the consistent
// estimates. Both read the same tree, so they share all randomness.
enum class Variant { kBasic, kFull };

inline std::string to_string(Variant v) {
  return v == Variant::kBasic ? "basic" : "full";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "basic") return Variant::kBasic;
  if (s == "full") return Variant::kFull;
  throw_invalid("variant must be 'basic' or 'full', got '" + s + "'");
}

struct ReleaseEntry {
  NodeId node;
  std::uint64_t copies;
};

// Number of trajectories terminating at each node, in postorder:
// n(v) = max(0, round(x(v) - sum of x over children)), rounding half to even.
// Nodes with n(v) = 0 are omitted.
inline std::vector<ReleaseEntry> release_plan(const NoisyPrefixTree& tree,
                                              Variant variant) {
  const auto count = [&](const TreeNode& n) {
    return variant == Variant::kBasic ? n.noisy_count : n.consistent;
  };
  std::vector<ReleaseEntry> plan;
  // (node, children already pushed)
  std::vector<std::pair<NodeId, bool>> stack;
  const auto& root = tree.root();
  for (std::uint32_t i = root.child_count; i > 0; --i) {
    stack.emplace_back(root.first_child + i - 1, false);
  }
  while (!stack.empty()) {
    auto& [id, expanded] = stack.back();
    const auto& n = tree.node(id);
    if (!expanded && !n.is_leaf()) {
      expanded = true;
      const NodeId parent = id;
      for (std::uint32_t i = n.child_count; i > 0; --i) {
        stack.emplace_back(tree.node(parent).first_child + i - 1, false);
      }
      continue;
    }
    const NodeId done = id;
    stack.pop_back();
    double children = 0.0;
    for (auto c : tree.children(done)) children += count(tree.node(c));
    const double terminated = std::nearbyint(count(tree.node(done)) - children);
    if (terminated > 0.0) {
      plan.push_back({done, static_cast<std::uint64_t>(terminated)});
    }
  }
  return plan;
}

inline TrajectoryDb generate_release(const NoisyPrefixTree& tree,
                                     Variant variant) {
  TrajectoryDb db;
  for (const auto& e : release_plan(tree, variant)) {
    const auto prefix = node_prefix(tree, e.node);
    db.records.insert(db.records.end(), e.copies, prefix);
  }
  return db;
}

// Streams the release in the standard text format without materializing it.
inline std::uint64_t write_release(const NoisyPrefixTree& tree, Variant variant,
                                   std::ostream& out) {
  std::uint64_t records = 0;
  std::string line;
  for (const auto& e : release_plan(tree, variant)) {
    line.clear();
    const auto prefix = node_prefix(tree, e.node);
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (i) line.push_back(' ');
      line += tree.universe().token(prefix[i]);
    }
    line.push_back('\n');
    for (std::uint64_t c = 0; c < e.copies; ++c) out << line;
    records += e.copies;
  }
  return records;
}

struct ReleaseStats {
  std::size_t records = 0;
  std::map<std::size_t, std::size_t> length_histogram;  // length -> count
  std::size_t distinct_locations = 0;
};

inline ReleaseStats release_stats(const TrajectoryDb& db) {
  ReleaseStats s;
  s.records = db.size();
  std::vector<bool> seen;
  for (const auto& t : db.records) {
    ++s.length_histogram[t.size()];
    for (auto loc : t) {
      if (loc >= seen.size()) seen.resize(loc + 1, false);
      if (!seen[loc]) {
        seen[loc] = true;
        ++s.distinct_locations;
      }
    }
  }
  return s;
}

}  // namespace trajdp
