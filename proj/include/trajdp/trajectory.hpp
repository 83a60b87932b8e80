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

// Trajectory databases: location interning and the line-oriented text format.
//
// A trajectory is an ordered list of location ids; repeats (including
// consecutive repeats) are allowed. A database is a multiset of trajectories.
// On disk, one trajectory per line, tokens separated by spaces or tabs.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "trajdp/error.hpp"

namespace trajdp {

using LocationId = std::uint32_t;
using Trajectory = std::vector<LocationId>;

// Bijection between opaque location tokens and dense ids [0, size).
class LocationUniverse {
 public:
  LocationUniverse() = default;

  // Throws kParse on a duplicate or empty token.
  static LocationUniverse from_tokens(std::vector<std::string> tokens) {
    LocationUniverse u;
    u.tokens_.reserve(tokens.size());
    for (auto& t : tokens) {
      if (t.empty()) throw Error(ErrorKind::kParse, "empty location token");
      if (u.find(t)) {
        throw Error(ErrorKind::kParse, "duplicate location token '" + t + "'");
      }
      u.intern(std::move(t));
    }
    return u;
  }

  // Returns the id of `token`, adding it at the end if unseen.
  LocationId intern(std::string token) {
    auto it = index_.find(token);
    if (it != index_.end()) return it->second;
    const auto id = static_cast<LocationId>(tokens_.size());
    index_.emplace(token, id);
    tokens_.push_back(std::move(token));
    return id;
  }

  std::optional<LocationId> find(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string& token(LocationId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  bool contains(LocationId id) const { return id < tokens_.size(); }

  friend bool operator==(const LocationUniverse& a, const LocationUniverse& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, LocationId> index_;
};

struct TrajectoryDb {
  std::vector<Trajectory> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  std::size_t max_length() const {
    std::size_t m = 0;
    for (const auto& t : records) m = std::max(m, t.size());
    return m;
  }
};

// S is a prefix of T iff |S| <= |T| and they agree on the first |S| places.
inline bool is_prefix(std::span<const LocationId> s,
                      std::span<const LocationId> t) {
  if (s.size() > t.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != t[i]) return false;
  }
  return true;
}

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t'; }

// Splits on runs of spaces/tabs. A trailing '\r' is treated as part of the
// last token; the format is LF-only.
inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_blank(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace detail

// How tokens absent from the universe are handled while reading.
enum class UnknownTokens {
  kReject,  // kUniverseViolation
  kIntern,  // append to the universe
};

// Reads a trajectory database from `in`, interning tokens into `universe`.
inline TrajectoryDb read_db(std::istream& in, LocationUniverse& universe,
                            UnknownTokens policy,
                            const std::string& source = "<stream>") {
  TrajectoryDb db;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::split_tokens(line);
    if (tokens.empty()) {
      throw Error(ErrorKind::kParse, source + ":" + std::to_string(line_no) +
                                         ": empty trajectory line");
    }
    Trajectory t;
    t.reserve(tokens.size());
    for (auto tok : tokens) {
      std::string token(tok);
      if (policy == UnknownTokens::kReject) {
        auto id = universe.find(token);
        if (!id) {
          throw Error(ErrorKind::kUniverseViolation,
                      source + ":" + std::to_string(line_no) +
                          ": location '" + token + "' is not in the universe");
        }
        t.push_back(*id);
      } else {
        t.push_back(universe.intern(std::move(token)));
      }
    }
    db.records.push_back(std::move(t));
  }
  if (in.bad()) throw Error(ErrorKind::kIo, "read failed: " + source);
  return db;
}

inline LocationUniverse load_universe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open universe file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = detail::split_tokens(line);
    if (parts.size() != 1) {
      throw Error(ErrorKind::kParse, path + ":" + std::to_string(line_no) +
                                         ": expected exactly one token");
    }
    tokens.emplace_back(parts.front());
  }
  return LocationUniverse::from_tokens(std::move(tokens));
}

struct LoadedDb {
  TrajectoryDb db;
  LocationUniverse universe;
  bool universe_from_data = false;
};

// Loads a database. With a universe file every token must belong to it.
// Without one, the universe is the distinct tokens in first-appearance order;
// that makes the output domain data-dependent, so a warning goes to `warn`.
inline LoadedDb load_db(const std::string& path,
                        const std::optional<std::string>& universe_path = {},
                        std::ostream* warn = &std::clog) {
  LoadedDb out;
  if (universe_path) out.universe = load_universe(*universe_path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open trajectory file: " + path);
  if (universe_path) {
    out.db = read_db(in, out.universe, UnknownTokens::kReject, path);
  } else {
    out.db = read_db(in, out.universe, UnknownTokens::kIntern, path);
    out.universe_from_data = true;
    if (warn) {
      *warn << "warning: location universe derived from " << path
            << "; supply a public universe file for a formal privacy "
               "guarantee\n";
    }
  }
  return out;
}

inline void write_trajectory(std::ostream& out, std::span<const LocationId> t,
                             const LocationUniverse& universe) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out.put(' ');
    out << universe.token(t[i]);
  }
  out.put('\n');
}

inline void write_db(std::ostream& out, const TrajectoryDb& db,
                     const LocationUniverse& universe) {
  for (const auto& t : db.records) write_trajectory(out, t, universe);
}

inline void write_db(const TrajectoryDb& db, const LocationUniverse& universe,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
  write_db(out, db, universe);
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

inline void write_universe(const LocationUniverse& universe,
                           const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
  for (const auto& t : universe.tokens()) out << t << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

// Timestamped trajectories are handled by interning each (location, time)
// pair as one composite token "loc@t"; the rest of the pipeline is unaware.
struct TimedLocation {
  std::string location;
  std::int64_t timestamp = 0;
};

inline std::string timestamped_token(const TimedLocation& p) {
  return p.location + "@" + std::to_string(p.timestamp);
}

inline Trajectory encode_timestamped(std::span<const TimedLocation> points,
                                     LocationUniverse& universe) {
  if (points.empty()) throw_invalid("timestamped trajectory is empty");
  Trajectory t;
  t.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].location.empty()) throw_invalid("empty location");
    if (i > 0 && points[i].timestamp < points[i - 1].timestamp) {
      throw_invalid("timestamps decrease at position " + std::to_string(i));
    }
    t.push_back(universe.intern(timestamped_token(points[i])));
  }
  return t;
}

// Splits "loc@t" at the last '@'. Returns nullopt when the token has no
// integer timestamp suffix.
inline std::optional<TimedLocation> parse_timestamped_token(
    std::string_view token) {
  const auto at = token.rfind('@');
  if (at == std::string_view::npos || at == 0 || at + 1 == token.size()) {
    return std::nullopt;
  }
  TimedLocation p{std::string(token.substr(0, at)), 0};
  try {
    std::size_t used = 0;
    const std::string ts(token.substr(at + 1));
    p.timestamp = std::stoll(ts, &used);
    if (used != ts.size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return p;
}

// Checks that every record of a timestamped database uses "loc@t" tokens with
// non-decreasing t. Throws kParse naming the first offending record.
inline void validate_timestamped(const TrajectoryDb& db,
                                 const LocationUniverse& universe) {
  for (std::size_t r = 0; r < db.records.size(); ++r) {
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < db.records[r].size(); ++i) {
      auto p = parse_timestamped_token(universe.token(db.records[r][i]));
      if (!p) {
        throw Error(ErrorKind::kParse, "record " + std::to_string(r + 1) +
                                           ": token without @timestamp");
      }
      if (i > 0 && p->timestamp < prev) {
        throw Error(ErrorKind::kParse, "record " + std::to_string(r + 1) +
                                           ": timestamps decrease");
      }
      prev = p->timestamp;
    }
  }
}

}  // namespace trajdp
