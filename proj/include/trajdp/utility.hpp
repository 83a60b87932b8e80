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

// Utility measures for sanitized trajectory data: count queries with relative
// error, and top-k frequent sequential patterns compared by true positives,
// false positives and false drops.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "trajdp/error.hpp"
#include "trajdp/parallel.hpp"
#include "trajdp/random.hpp"
#include "trajdp/trajectory.hpp"

namespace trajdp {

// ---------------------------------------------------------------------------
// Count queries

// A set of locations; a record matches when it visits every one of them,
// in any order.
class CountQuery {
 public:
  explicit CountQuery(std::vector<LocationId> locations)
      : locations_(std::move(locations)) {
    std::sort(locations_.begin(), locations_.end());
    locations_.erase(std::unique(locations_.begin(), locations_.end()),
                     locations_.end());
    if (locations_.empty()) throw_invalid("count query must be non-empty");
  }

  const std::vector<LocationId>& locations() const { return locations_; }
  std::size_t length() const { return locations_.size(); }

 private:
  std::vector<LocationId> locations_;  // sorted, unique
};

namespace detail {

inline std::vector<LocationId> location_set(std::span<const LocationId> t) {
  std::vector<LocationId> s(t.begin(), t.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace detail

// Reference evaluation by a full scan.
inline std::uint64_t eval_count_query(const TrajectoryDb& db,
                                      const CountQuery& q) {
  std::uint64_t n = 0;
  for (const auto& t : db.records) {
    const auto s = detail::location_set(t);
    n += std::includes(s.begin(), s.end(), q.locations().begin(),
                       q.locations().end());
  }
  return n;
}

// Inverted index over distinct location sets, weighted by multiplicity.
class CountQueryIndex {
 public:
  explicit CountQueryIndex(const TrajectoryDb& db) {
    std::map<std::vector<LocationId>, std::uint64_t> sets;
    for (const auto& t : db.records) ++sets[detail::location_set(t)];
    weights_.reserve(sets.size());
    for (const auto& [set, weight] : sets) {
      const auto id = static_cast<std::uint32_t>(weights_.size());
      weights_.push_back(weight);
      for (auto loc : set) {
        if (loc >= postings_.size()) postings_.resize(loc + 1);
        postings_[loc].push_back(id);
      }
    }
  }

  std::uint64_t count(const CountQuery& q) const {
    std::vector<const std::vector<std::uint32_t>*> lists;
    for (auto loc : q.locations()) {
      if (loc >= postings_.size() || postings_[loc].empty()) return 0;
      lists.push_back(&postings_[loc]);
    }
    std::sort(lists.begin(), lists.end(),
              [](auto* a, auto* b) { return a->size() < b->size(); });
    std::uint64_t n = 0;
    for (auto id : *lists.front()) {
      bool all = true;
      for (std::size_t i = 1; i < lists.size() && all; ++i) {
        all = std::binary_search(lists[i]->begin(), lists[i]->end(), id);
      }
      if (all) n += weights_[id];
    }
    return n;
  }

 private:
  std::vector<std::vector<std::uint32_t>> postings_;
  std::vector<std::uint64_t> weights_;
};

// |noisy - true| / max(true, sanity).
inline double relative_error(std::uint64_t true_count, std::uint64_t noisy_count,
                             double sanity) {
  const double diff = std::fabs(static_cast<double>(noisy_count) -
                                static_cast<double>(true_count));
  return diff / std::max(static_cast<double>(true_count), sanity);
}

struct QuerySubset {
  std::size_t max_length = 0;
  std::vector<CountQuery> queries;
};

struct QueryWorkload {
  int height = 0;
  std::uint64_t seed = 0;
  std::vector<QuerySubset> subsets;  // four, by increasing max length

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& s : subsets) n += s.queries.size();
    return n;
  }
};

// Four subsets of `per_subset` queries; the i-th subset's lengths are uniform
// on [1, floor(i*h/4)], capped at the universe size. Locations are drawn
// without replacement.
inline QueryWorkload generate_workload(std::size_t universe_size, int height,
                                       std::size_t per_subset,
                                       std::uint64_t seed) {
  if (per_subset < 1) throw_invalid("queries per subset must be at least 1");
  if (universe_size == 0) throw_invalid("location universe is empty");
  QueryWorkload w;
  w.height = height;
  w.seed = seed;
  RandomSource rng(seed);
  std::vector<LocationId> all(universe_size);
  for (std::size_t i = 0; i < universe_size; ++i) {
    all[i] = static_cast<LocationId>(i);
  }
  for (int i = 1; i <= 4; ++i) {
    const long long max_len = static_cast<long long>(i) * height / 4;
    if (max_len < 1) {
      throw_invalid("subset " + std::to_string(i) + " max length i*h/4 < 1");
    }
    QuerySubset subset;
    subset.max_length =
        std::min<std::size_t>(static_cast<std::size_t>(max_len), universe_size);
    std::uniform_int_distribution<std::size_t> length(1, subset.max_length);
    subset.queries.reserve(per_subset);
    for (std::size_t q = 0; q < per_subset; ++q) {
      const std::size_t len = length(rng);
      for (std::size_t s = 0; s < len; ++s) {
        std::uniform_int_distribution<std::size_t> pick(s, universe_size - 1);
        std::swap(all[s], all[pick(rng)]);
      }
      subset.queries.emplace_back(
          std::vector<LocationId>(all.begin(), all.begin() + len));
    }
    w.subsets.push_back(std::move(subset));
  }
  return w;
}

struct SubsetError {
  std::size_t max_length = 0;
  std::size_t queries = 0;
  double average_relative_error = 0.0;
};

inline std::vector<SubsetError> evaluate_workload(
    const CountQueryIndex& raw, const CountQueryIndex& sanitized,
    const QueryWorkload& workload, double sanity, unsigned threads = 1) {
  std::vector<SubsetError> out;
  for (const auto& subset : workload.subsets) {
    std::vector<double> errors(subset.queries.size());
    detail::parallel_for(errors.size(), threads,
                         [&](std::size_t b, std::size_t e) {
                           for (std::size_t i = b; i < e; ++i) {
                             const auto& q = subset.queries[i];
                             errors[i] = relative_error(raw.count(q),
                                                        sanitized.count(q),
                                                        sanity);
                           }
                         });
    double sum = 0.0;
    for (double e : errors) sum += e;
    out.push_back({subset.max_length, errors.size(),
                   errors.empty() ? 0.0 : sum / errors.size()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frequent sequential patterns

using Pattern = std::vector<LocationId>;

struct SeqPattern {
  Pattern locations;
  std::uint64_t support = 0;  // records containing it as a subsequence

  friend bool operator==(const SeqPattern&, const SeqPattern&) = default;
};

// True if `pattern` occurs in `t` as an order-preserving subsequence.
inline bool contains_subsequence(std::span<const LocationId> t,
                                 std::span<const LocationId> pattern) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < t.size() && j < pattern.size(); ++i) {
    if (t[i] == pattern[j]) ++j;
  }
  return j == pattern.size();
}

// Ranking used for top-k: higher support, then shorter, then
// lexicographically smaller location ids.
inline bool ranks_before(const SeqPattern& a, const SeqPattern& b) {
  if (a.support != b.support) return a.support > b.support;
  if (a.locations.size() != b.locations.size()) {
    return a.locations.size() < b.locations.size();
  }
  return a.locations < b.locations;
}

struct TopKResult {
  std::vector<SeqPattern> patterns;  // in rank order
  bool short_result = false;         // fewer than k patterns exist
};

// Top-k sequential patterns by PrefixSpan-style projection, expanded
// best-first. Support never grows under extension, so patterns leave the
// queue in exact rank order and mining stops after k.
inline TopKResult mine_top_k(const TrajectoryDb& db, std::size_t k,
                             std::optional<std::size_t> max_len = {}) {
  if (k < 1) throw_invalid("k must be at least 1");
  if (max_len && *max_len < 1) throw_invalid("max pattern length must be >= 1");

  // Identical records collapse into one weighted record.
  std::map<Trajectory, std::uint64_t> grouped;
  for (const auto& t : db.records) ++grouped[t];
  std::vector<const Trajectory*> records;
  std::vector<std::uint64_t> weight;
  std::size_t universe = 0;
  for (const auto& [t, w] : grouped) {
    records.push_back(&t);
    weight.push_back(w);
    for (auto loc : t) universe = std::max<std::size_t>(universe, loc + 1);
  }

  using Projection = std::vector<std::pair<std::uint32_t, std::uint32_t>>;
  struct Candidate {
    SeqPattern pattern;
    std::int64_t parent;  // index into `expanded`, -1 for the empty pattern
  };
  const auto worse = [](const Candidate& a, const Candidate& b) {
    return ranks_before(b.pattern, a.pattern);
  };
  std::priority_queue<Candidate, std::vector<Candidate>, decltype(worse)>
      queue(worse);

  std::vector<Projection> expanded;
  std::vector<std::uint64_t> counts(universe, 0);
  std::vector<std::uint32_t> last_seen(universe, UINT32_MAX);
  std::vector<LocationId> touched;

  const auto extend = [&](const Projection& proj, const Pattern& prefix,
                          std::int64_t parent) {
    touched.clear();
    for (const auto& [r, pos] : proj) {
      const auto& t = *records[r];
      for (std::size_t i = pos; i < t.size(); ++i) {
        const LocationId loc = t[i];
        if (last_seen[loc] == r) continue;
        if (counts[loc] == 0) touched.push_back(loc);
        last_seen[loc] = r;
        counts[loc] += weight[r];
      }
    }
    for (auto loc : touched) {
      Pattern p = prefix;
      p.push_back(loc);
      queue.push({{std::move(p), counts[loc]}, parent});
      counts[loc] = 0;
      last_seen[loc] = UINT32_MAX;
    }
  };

  Projection root(records.size());
  for (std::uint32_t r = 0; r < records.size(); ++r) root[r] = {r, 0};
  extend(root, {}, -1);
  root.clear();
  root.shrink_to_fit();

  TopKResult result;
  while (result.patterns.size() < k && !queue.empty()) {
    Candidate best = queue.top();
    queue.pop();
    const LocationId item = best.pattern.locations.back();
    Projection proj;
    if (best.parent < 0) {
      for (std::uint32_t r = 0; r < records.size(); ++r) {
        const auto& t = *records[r];
        auto it = std::find(t.begin(), t.end(), item);
        if (it != t.end()) proj.emplace_back(r, (it - t.begin()) + 1);
      }
    } else {
      for (const auto& [r, pos] : expanded[best.parent]) {
        const auto& t = *records[r];
        auto it = std::find(t.begin() + pos, t.end(), item);
        if (it != t.end()) proj.emplace_back(r, (it - t.begin()) + 1);
      }
    }
    result.patterns.push_back(best.pattern);
    if (!max_len || best.pattern.locations.size() < *max_len) {
      const auto index = static_cast<std::int64_t>(expanded.size());
      extend(proj, best.pattern.locations, index);
      expanded.push_back(std::move(proj));
    } else {
      expanded.emplace_back();
    }
  }
  result.short_result = result.patterns.size() < k;
  return result;
}

struct FspMetrics {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_drops = 0;
};

// Overlap between the pattern sets mined from the raw and sanitized data.
// Supports are ignored; patterns are compared by their location sequence.
inline FspMetrics fsp_metrics(std::span<const SeqPattern> raw,
                              std::span<const SeqPattern> sanitized) {
  std::set<Pattern> truth;
  for (const auto& p : raw) truth.insert(p.locations);
  std::set<Pattern> found;
  for (const auto& p : sanitized) found.insert(p.locations);
  FspMetrics m;
  for (const auto& p : found) m.true_positives += truth.count(p);
  m.false_positives = found.size() - m.true_positives;
  m.false_drops = truth.size() - m.true_positives;
  return m;
}

}  // namespace trajdp
