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

// Exact and differentially private prefix trees over trajectory databases.
//
// Nodes live in one arena in breadth-first order: the root is node 0, every
// level occupies a contiguous index range, and the children of a node are
// contiguous and sorted by location. That layout lets the inference passes
// run top-down as a plain index sweep.
//
// The noisy tree is grown one level at a time up to height h. For a frontier
// node v every location of the universe is a candidate child u:
//   - candidates with trajectories get c(u) = |tr(u)| + Laplace(1/eps_bar)
//     and are kept iff c(u) >= theta;
//   - the m remaining (empty) candidates are not enumerated. The number that
//     would pass is drawn from Binomial(m, p_theta), that many empty
//     locations are picked uniformly without replacement, and each gets a
//     count from the Laplace tail conditioned on >= theta.
// Empty-born nodes are leaves unless expand_empty is set.

#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <ranges>
#include <string>
#include <utility>
#include <vector>

#include "trajdp/error.hpp"
#include "trajdp/parallel.hpp"
#include "trajdp/privacy.hpp"
#include "trajdp/random.hpp"
#include "trajdp/trajectory.hpp"

namespace trajdp {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
  LocationId location = 0;  // meaningless on the root
  NodeId parent = kNoNode;
  NodeId first_child = 0;
  std::uint32_t child_count = 0;
  std::uint16_t depth = 0;
  bool empty_born = false;
  std::uint64_t true_count = 0;  // |tr(v)|; construction-time only
  double noisy_count = 0.0;      // c(v)
  double consolidated = 0.0;     // mean of path-wise isotonic estimates
  double consistent = 0.0;       // after top-down adjustment

  bool is_leaf() const { return child_count == 0; }
};

class NoisyPrefixTree {
 public:
  NoisyPrefixTree() : nodes_(1) {}

  const TreeNode& root() const { return nodes_.front(); }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  TreeNode& node(NodeId id) { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& nodes() { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  auto children(NodeId id) const {
    const auto& n = nodes_[id];
    return std::views::iota(n.first_child, n.first_child + n.child_count);
  }

  // Deepest populated level (0 when only the root exists).
  int depth() const { return static_cast<int>(level_starts_.size()) - 2; }
  // Node index range [begin, end) of `level`.
  NodeId level_begin(int level) const { return level_starts_.at(level); }
  NodeId level_end(int level) const { return level_starts_.at(level + 1); }

  int max_height() const { return max_height_; }
  double threshold() const { return threshold_; }
  const std::optional<PrivacyParams>& params() const { return params_; }
  const LocationUniverse& universe() const { return universe_; }
  const BudgetLedger& ledger() const { return ledger_; }

  std::size_t leaf_count() const {
    std::size_t n = 0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) n += nodes_[i].is_leaf();
    return n;
  }

 private:
  template <class Noise>
  friend class TreeBuilder;

  std::vector<TreeNode> nodes_;
  std::vector<NodeId> level_starts_{0, 1};
  int max_height_ = 0;
  double threshold_ = 0.0;
  std::optional<PrivacyParams> params_;
  LocationUniverse universe_;
  BudgetLedger ledger_;
};

struct NoisyTreeOptions {
  bool sample_empty = true;   // statistical process for empty candidates
  bool expand_empty = false;  // grow children under empty-born nodes
  std::optional<double> threshold;  // overrides params.threshold
  unsigned threads = 1;
  std::size_t max_nodes = 200'000'000;
};

template <class Noise>
class TreeBuilder {
 public:
  TreeBuilder(const TrajectoryDb& db, const LocationUniverse& universe,
              int height, double threshold, double scale,
              std::uint64_t seed, const NoisyTreeOptions& opts, Noise noise)
      : db_(db), universe_size_(universe.size()), height_(height),
        threshold_(threshold), scale_(scale), master_(seed), opts_(opts),
        noise_(noise) {
    tree_.universe_ = universe;
    tree_.max_height_ = height;
    tree_.threshold_ = threshold;
    for (const auto& t : db.records) {
      for (auto loc : t) {
        if (loc >= universe_size_) {
          throw Error(ErrorKind::kUniverseViolation,
                      "location id " + std::to_string(loc) +
                          " outside universe of size " +
                          std::to_string(universe_size_));
        }
      }
    }
  }

  NoisyPrefixTree build(const PrivacyParams* params) {
    if (params) {
      tree_.params_ = *params;
      tree_.ledger_ = BudgetLedger(*params);
    }
    order_.resize(db_.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;

    auto& root = tree_.nodes_.front();
    root.true_count = db_.size();
    root.noisy_count = root.consolidated = root.consistent =
        static_cast<double>(db_.size());

    std::vector<Frontier> frontier;
    frontier.push_back({0, 0, static_cast<std::uint32_t>(db_.size()),
                        master_.seed()});

    for (int depth = 0; depth < height_; ++depth) {
      if (params) tree_.ledger_.charge(depth + 1, frontier.size());
      if (frontier.empty()) continue;

      std::vector<std::vector<Child>> expanded(frontier.size());
      detail::parallel_for(
          frontier.size(), opts_.threads, [&](std::size_t b, std::size_t e) {
            std::vector<std::pair<LocationId, std::uint32_t>> scratch;
            std::vector<LocationId> pool;
            for (std::size_t i = b; i < e; ++i) {
              expanded[i] = expand(frontier[i], depth, scratch, pool);
            }
          });

      std::vector<Frontier> next;
      const bool more_levels = depth + 1 < height_;
      for (std::size_t i = 0; i < frontier.size(); ++i) {
        auto& kids = expanded[i];
        const auto first = static_cast<NodeId>(tree_.nodes_.size());
        if (tree_.nodes_.size() + kids.size() > opts_.max_nodes) {
          throw_invalid("noisy prefix tree exceeds " +
                        std::to_string(opts_.max_nodes) + " nodes");
        }
        tree_.nodes_[frontier[i].node].first_child = first;
        tree_.nodes_[frontier[i].node].child_count =
            static_cast<std::uint32_t>(kids.size());
        for (const auto& c : kids) {
          TreeNode n;
          n.location = c.location;
          n.parent = frontier[i].node;
          n.depth = static_cast<std::uint16_t>(depth + 1);
          n.empty_born = c.empty_born;
          n.true_count = c.end - c.begin;
          n.noisy_count = c.noisy;
          const auto id = static_cast<NodeId>(tree_.nodes_.size());
          tree_.nodes_.push_back(n);
          if (more_levels && (!c.empty_born || opts_.expand_empty)) {
            next.push_back({id, c.begin, c.end,
                            derive_key(frontier[i].key, c.location)});
          }
        }
      }
      tree_.level_starts_.push_back(
          static_cast<NodeId>(tree_.nodes_.size()));
      frontier = std::move(next);
    }
    // Drop trailing empty levels so depth() reports the populated height.
    while (tree_.level_starts_.size() > 2 &&
           tree_.level_starts_[tree_.level_starts_.size() - 1] ==
               tree_.level_starts_[tree_.level_starts_.size() - 2]) {
      tree_.level_starts_.pop_back();
    }
    return std::move(tree_);
  }

 private:
  struct Frontier {
    NodeId node;
    std::uint32_t begin, end;  // slice of order_ holding tr(node)
    std::uint64_t key;         // path-derived stream key
  };
  struct Child {
    LocationId location;
    double noisy;
    std::uint32_t begin, end;
    bool empty_born;
  };

  static constexpr LocationId kEnded = std::numeric_limits<LocationId>::max();

  std::vector<Child> expand(
      const Frontier& f, int depth,
      std::vector<std::pair<LocationId, std::uint32_t>>& scratch,
      std::vector<LocationId>& pool) const {
    // Group tr(v) by the location at position `depth`; trajectories that end
    // at v sort last and are not passed down.
    scratch.clear();
    for (std::uint32_t i = f.begin; i < f.end; ++i) {
      const auto& t = db_.records[order_[i]];
      scratch.emplace_back(
          t.size() > static_cast<std::size_t>(depth) ? t[depth] : kEnded,
          order_[i]);
    }
    std::sort(scratch.begin(), scratch.end());
    for (std::uint32_t i = f.begin; i < f.end; ++i) {
      order_[i] = scratch[i - f.begin].second;
    }

    RandomSource rng = master_.substream(f.key);
    std::vector<Child> kept;
    std::vector<LocationId> non_empty;
    std::size_t i = 0;
    while (i < scratch.size() && scratch[i].first != kEnded) {
      std::size_t j = i;
      while (j < scratch.size() && scratch[j].first == scratch[i].first) ++j;
      const LocationId loc = scratch[i].first;
      non_empty.push_back(loc);
      const double c = noise_(j - i, scale_, rng);
      if (c >= threshold_) {
        kept.push_back({loc, c, static_cast<std::uint32_t>(f.begin + i),
                        static_cast<std::uint32_t>(f.begin + j), false});
      }
      i = j;
    }

    if (opts_.sample_empty && tree_.params_) {
      const std::uint64_t m = universe_size_ - non_empty.size();
      const std::uint64_t k = sample_pass_count(m, *tree_.params_, rng);
      if (k > 0) {
        // Partial Fisher-Yates over the empty locations.
        pool.clear();
        std::size_t ne = 0;
        for (LocationId loc = 0; loc < universe_size_; ++loc) {
          if (ne < non_empty.size() && non_empty[ne] == loc) {
            ++ne;
          } else {
            pool.push_back(loc);
          }
        }
        for (std::size_t s = 0; s < k; ++s) {
          std::uniform_int_distribution<std::size_t> pick(s, pool.size() - 1);
          std::swap(pool[s], pool[pick(rng)]);
          kept.push_back({pool[s], sample_passing_noisy_count(*tree_.params_, rng),
                          0, 0, true});
        }
        std::sort(kept.begin(), kept.end(), [](const Child& a, const Child& b) {
          return a.location < b.location;
        });
      }
    }
    return kept;
  }

  const TrajectoryDb& db_;
  std::size_t universe_size_;
  int height_;
  double threshold_;
  double scale_;
  RandomSource master_;
  NoisyTreeOptions opts_;
  Noise noise_;
  mutable std::vector<std::uint32_t> order_;
  NoisyPrefixTree tree_;
};

// Differentially private prefix tree of height params.height. Every level
// 1..h is charged params.per_level in the tree's ledger, including levels
// the data never reaches, so the reported spend does not depend on the data.
template <class Noise = LaplaceNoise>
NoisyPrefixTree build_noisy_tree(const TrajectoryDb& db,
                                 const LocationUniverse& universe,
                                 const PrivacyParams& params,
                                 std::uint64_t seed,
                                 const NoisyTreeOptions& opts = {},
                                 Noise noise = {}) {
  const double threshold = opts.threshold.value_or(params.threshold);
  TreeBuilder<Noise> builder(db, universe, params.height, threshold,
                             params.laplace_scale(), seed, opts, noise);
  return builder.build(&params);
}

// Noise-free prefix tree of the whole database: one node per distinct prefix,
// all counts equal to |tr(v)|.
inline NoisyPrefixTree build_exact_tree(const TrajectoryDb& db,
                                        const LocationUniverse& universe) {
  NoisyTreeOptions opts;
  opts.sample_empty = false;
  const int height = static_cast<int>(db.max_length());
  TreeBuilder<ZeroNoise> builder(db, universe, height, 1.0, 1.0, 0, opts, {});
  auto tree = builder.build(nullptr);
  for (auto& n : tree.nodes()) n.consolidated = n.consistent = n.noisy_count;
  return tree;
}

// Locations on the path from the root to `id`.
inline Trajectory node_prefix(const NoisyPrefixTree& tree, NodeId id) {
  if (id == 0) throw_invalid("the root has no prefix");
  Trajectory out(tree.node(id).depth);
  for (NodeId cur = id; cur != 0; cur = tree.node(cur).parent) {
    out[tree.node(cur).depth - 1] = tree.node(cur).location;
  }
  return out;
}

// Finds the node whose prefix is `prefix`, or kNoNode.
inline NodeId find_node(const NoisyPrefixTree& tree,
                        std::span<const LocationId> prefix) {
  NodeId cur = 0;
  for (auto loc : prefix) {
    const auto kids = tree.children(cur);
    auto it = std::ranges::lower_bound(kids, loc, {}, [&](NodeId c) {
      return tree.node(c).location;
    });
    if (it == kids.end() || tree.node(*it).location != loc) return kNoNode;
    cur = *it;
  }
  return cur;
}

// Text outline, one node per line in preorder: two spaces of indent per level
// below the first, the location token, then the noisy count to 2 decimals.
inline void dump_tree(const NoisyPrefixTree& tree, std::ostream& out) {
  std::vector<NodeId> stack;
  const auto push_children = [&](NodeId id) {
    const auto& n = tree.node(id);
    for (std::uint32_t i = n.child_count; i > 0; --i) {
      stack.push_back(n.first_child + i - 1);
    }
  };
  push_children(0);
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(2);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const auto& n = tree.node(id);
    out << std::string(2 * (n.depth - 1), ' ')
        << tree.universe().token(n.location) << ' ' << n.noisy_count << '\n';
    push_children(id);
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace trajdp
