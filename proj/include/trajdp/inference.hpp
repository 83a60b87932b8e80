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

// Constrained inference over a noisy prefix tree.
//
// Two constraints hold for exact counts: along a root-to-leaf path a child
// never exceeds its parent, and a parent is at least the sum of its children.
// Inference runs in two passes:
//   1. every root-to-leaf path, read leaf first, gets its minimum-L2
//      non-decreasing fit; a node's consolidated estimate is the mean of its
//      fits over all paths through it;
//   2. top-down, children whose consolidated estimates overshoot the
//      parent's consistent estimate share the deficit equally. Children are
//      never raised.
// Estimates stay real-valued; integerization happens at release time.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "trajdp/parallel.hpp"
#include "trajdp/prefix_tree.hpp"

namespace trajdp {

// Minimum-L2 non-decreasing fit by pool-adjacent-violators, O(n).
inline std::vector<double> isotonic_fit(std::span<const double> values) {
  struct Block {
    double mean;
    std::size_t size;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 &&
           blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block top = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const std::size_t n = prev.size + top.size;
      prev.mean = (prev.mean * prev.size + top.mean * top.size) / n;
      prev.size = n;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : blocks) out.insert(out.end(), b.size, b.mean);
  return out;
}

namespace detail {

// mean[i, j] for 0 <= i <= j < n from prefix sums.
class RangeMeans {
 public:
  explicit RangeMeans(std::span<const double> v) : prefix_(v.size() + 1, 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) prefix_[i + 1] = prefix_[i] + v[i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return (prefix_[j + 1] - prefix_[i]) / static_cast<double>(j - i + 1);
  }

 private:
  std::vector<double> prefix_;
};

}  // namespace detail

// Min-max form: L_m = min_{j >= m} max_{i <= j} mean[i, j]. O(n^2).
inline std::vector<double> isotonic_fit_min_max(std::span<const double> values) {
  const std::size_t n = values.size();
  const detail::RangeMeans mean(values);
  std::vector<double> out(n);
  double running = 0.0;
  for (std::size_t jj = n; jj-- > 0;) {
    double best = mean(0, jj);
    for (std::size_t i = 1; i <= jj; ++i) best = std::max(best, mean(i, jj));
    running = (jj + 1 == n) ? best : std::min(running, best);
    out[jj] = running;
  }
  return out;
}

// Max-min form: U_m = max_{i <= m} min_{j >= i} mean[i, j]. O(n^2).
inline std::vector<double> isotonic_fit_max_min(std::span<const double> values) {
  const std::size_t n = values.size();
  const detail::RangeMeans mean(values);
  std::vector<double> out(n);
  double running = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = mean(i, i);
    for (std::size_t j = i + 1; j < n; ++j) best = std::min(best, mean(i, j));
    running = (i == 0) ? best : std::max(running, best);
    out[i] = running;
  }
  return out;
}

// Fills TreeNode::consolidated on every non-root node. Level-1 subtrees are
// independent and may be processed concurrently.
inline void consolidate(NoisyPrefixTree& tree, unsigned threads = 1) {
  auto& nodes = tree.nodes();
  std::vector<std::uint32_t> path_count(nodes.size(), 0);
  for (std::size_t i = 1; i < nodes.size(); ++i) nodes[i].consolidated = 0.0;
  if (tree.depth() < 1) return;

  const NodeId first = tree.level_begin(1);
  const NodeId last = tree.level_end(1);
  detail::parallel_for(last - first, threads, [&](std::size_t b, std::size_t e) {
    std::vector<NodeId> stack;
    std::vector<NodeId> path;
    std::vector<double> seq;
    for (std::size_t s = b; s < e; ++s) {
      stack.assign(1, static_cast<NodeId>(first + s));
      while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        const auto& n = nodes[id];
        if (!n.is_leaf()) {
          for (std::uint32_t c = n.child_count; c > 0; --c) {
            stack.push_back(n.first_child + c - 1);
          }
          continue;
        }
        path.clear();
        seq.clear();
        for (NodeId cur = id; cur != 0; cur = nodes[cur].parent) {
          path.push_back(cur);
          seq.push_back(nodes[cur].noisy_count);
        }
        const auto fit = isotonic_fit(seq);
        for (std::size_t k = 0; k < path.size(); ++k) {
          nodes[path[k]].consolidated += fit[k];
          ++path_count[path[k]];
        }
      }
    }
  });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    nodes[i].consolidated /= path_count[i];
  }
}

// Fills TreeNode::consistent top-down from the consolidated estimates.
// Level-1 nodes keep their consolidated value.
inline void consistent_estimates(NoisyPrefixTree& tree) {
  auto& nodes = tree.nodes();
  for (auto c : tree.children(0)) nodes[c].consistent = nodes[c].consolidated;
  // Breadth-first layout: a parent's index precedes its children's.
  for (std::size_t w = 1; w < nodes.size(); ++w) {
    const auto& parent = nodes[w];
    if (parent.is_leaf()) continue;
    double sum = 0.0;
    for (auto c : tree.children(static_cast<NodeId>(w))) {
      sum += nodes[c].consolidated;
    }
    double share =
        std::min(0.0, (parent.consistent - sum) / parent.child_count);
    // Rounding in the adjusted sum can leave it a few ulps above the parent;
    // shave the excess off again until it does not.
    for (int round = 0; round < 64; ++round) {
      double adjusted = 0.0;
      for (auto c : tree.children(static_cast<NodeId>(w))) {
        nodes[c].consistent = nodes[c].consolidated + share;
        adjusted += nodes[c].consistent;
      }
      if (adjusted <= parent.consistent) break;
      const double step = (adjusted - parent.consistent) / parent.child_count;
      share = std::min(share - step, std::nextafter(share, -HUGE_VAL));
    }
  }
}

inline void run_inference(NoisyPrefixTree& tree, unsigned threads = 1) {
  consolidate(tree, threads);
  consistent_estimates(tree);
}

// Internal non-root nodes whose children's consistent estimates sum to more
// than their own plus `tolerance`.
inline std::size_t sum_constraint_violations(const NoisyPrefixTree& tree,
                                             double tolerance = 1e-9) {
  std::size_t bad = 0;
  for (NodeId w = 1; w < tree.size(); ++w) {
    const auto& n = tree.node(w);
    if (n.is_leaf()) continue;
    double sum = 0.0;
    for (auto c : tree.children(w)) sum += tree.node(c).consistent;
    if (sum > n.consistent + tolerance) ++bad;
  }
  return bad;
}

// Non-root, non-level-1 nodes whose consistent estimate exceeds their
// parent's by more than `tolerance`. Not guaranteed to be zero after
// consolidation across paths; reported for diagnostics only.
inline std::size_t path_constraint_violations(const NoisyPrefixTree& tree,
                                              double tolerance = 1e-9) {
  std::size_t bad = 0;
  for (NodeId v = 1; v < tree.size(); ++v) {
    const auto& n = tree.node(v);
    if (n.parent == 0) continue;
    if (n.consistent > tree.node(n.parent).consistent + tolerance) ++bad;
  }
  return bad;
}

}  // namespace trajdp
