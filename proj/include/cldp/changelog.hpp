//
// Copyright 2026 The cldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Dynamic databases represented as changelogs: mutations in "value change"
// form, snapshot reconstruction, time-range filters, adjacency, and
// mutation constraints (at-most-k, time-bounded, hybrid).

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "cldp/errors.hpp"

namespace cldp {

// Abstract integer time. Durations (W, P, B, T) are tick counts.
using Timestamp = std::int64_t;
using Duration = std::int64_t;
using EntryId = std::string;

// One change of one entry. An absent `prev` marks an insertion, an absent
// `next` a deletion; both absent is not a mutation.
struct Mutation {
  EntryId entry;
  Timestamp time = 0;
  std::optional<double> prev;
  std::optional<double> next;

  static Mutation Insert(EntryId entry, Timestamp time, double value) {
    return {std::move(entry), time, std::nullopt, value};
  }
  static Mutation Modify(EntryId entry, Timestamp time, double from, double to) {
    return {std::move(entry), time, from, to};
  }
  static Mutation Delete(EntryId entry, Timestamp time, double from) {
    return {std::move(entry), time, from, std::nullopt};
  }

  bool is_insertion() const { return !prev.has_value(); }
  bool is_deletion() const { return !next.has_value(); }

  friend bool operator==(const Mutation&, const Mutation&) = default;
};

// Changelog order: by time, then by entry id.
inline bool MutationOrder(const Mutation& a, const Mutation& b) {
  return std::tie(a.time, a.entry) < std::tie(b.time, b.entry);
}

inline std::string Describe(const Mutation& m) {
  std::ostringstream out;
  out << "mutation(entry=" << m.entry << ", t=" << m.time << ", ";
  if (m.prev) out << *m.prev; else out << "null";
  out << " -> ";
  if (m.next) out << *m.next; else out << "null";
  out << ")";
  return out.str();
}

// Current value of every live entry.
using DatabaseSnapshot = std::map<EntryId, double>;

namespace internal {

inline void ApplyOne(DatabaseSnapshot& state, const Mutation& m,
                     std::size_t index) {
  if (!m.prev && !m.next) {
    throw ConsistencyError(Describe(m) + " records no change", index);
  }
  auto it = state.find(m.entry);
  if (!m.prev) {
    if (it != state.end()) {
      throw ConsistencyError(Describe(m) + " inserts an entry that exists",
                             index);
    }
    state.emplace(m.entry, *m.next);
    return;
  }
  if (it == state.end()) {
    throw ConsistencyError(Describe(m) + " targets an absent entry", index);
  }
  if (it->second != *m.prev) {
    throw ConsistencyError(Describe(m) + " does not match current value", index);
  }
  if (m.next) {
    it->second = *m.next;
  } else {
    state.erase(it);
  }
}

}  // namespace internal

// Returns `snapshot` with `mutations` applied in order. Throws
// ConsistencyError naming the first mutation that does not fit.
inline DatabaseSnapshot ApplyMutations(DatabaseSnapshot snapshot,
                                       std::span<const Mutation> mutations) {
  for (std::size_t i = 0; i < mutations.size(); ++i) {
    internal::ApplyOne(snapshot, mutations[i], i);
  }
  return snapshot;
}

// Immutable, sorted, chain-consistent sequence of mutations.
class Changelog {
 public:
  Changelog() = default;

  // Throws ConsistencyError if the input is unsorted, repeats an
  // (entry, time) pair, or breaks an entry's prev/next chain.
  explicit Changelog(std::vector<Mutation> mutations)
      : mutations_(std::move(mutations)) {
    for (std::size_t i = 1; i < mutations_.size(); ++i) {
      if (!MutationOrder(mutations_[i - 1], mutations_[i])) {
        throw ConsistencyError(
            Describe(mutations_[i]) + " is out of (time, entry) order", i);
      }
    }
    DatabaseSnapshot state;
    for (std::size_t i = 0; i < mutations_.size(); ++i) {
      internal::ApplyOne(state, mutations_[i], i);
    }
  }

  std::span<const Mutation> mutations() const { return mutations_; }
  std::size_t size() const { return mutations_.size(); }
  bool empty() const { return mutations_.empty(); }
  auto begin() const { return mutations_.begin(); }
  auto end() const { return mutations_.end(); }
  const Mutation& operator[](std::size_t i) const { return mutations_[i]; }

  // Distinct entry ids, sorted.
  std::vector<EntryId> entries() const {
    std::vector<EntryId> ids;
    for (const auto& m : mutations_) ids.push_back(m.entry);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
  }

  bool contains_entry(const EntryId& id) const {
    return std::any_of(mutations_.begin(), mutations_.end(),
                       [&](const Mutation& m) { return m.entry == id; });
  }

  std::vector<Mutation> mutations_of(const EntryId& id) const {
    std::vector<Mutation> out;
    for (const auto& m : mutations_) {
      if (m.entry == id) out.push_back(m);
    }
    return out;
  }

  friend bool operator==(const Changelog&, const Changelog&) = default;

 private:
  std::vector<Mutation> mutations_;
};

// Accepts mutations with start < time <= end. A missing start is -inf.
class TimeRangeFilter {
 public:
  TimeRangeFilter(std::optional<Timestamp> start, Timestamp end)
      : start_(start), end_(end) {
    if (start_ && *start_ >= end_) {
      throw InvalidArgumentError("time range filter needs start < end");
    }
  }

  static TimeRangeFilter UpTo(Timestamp end) { return {std::nullopt, end}; }

  std::optional<Timestamp> start() const { return start_; }
  Timestamp end() const { return end_; }

  bool accepts(Timestamp t) const {
    return (!start_ || *start_ < t) && t <= end_;
  }
  bool accepts(const Mutation& m) const { return accepts(m.time); }

  friend bool operator==(const TimeRangeFilter&,
                         const TimeRangeFilter&) = default;

 private:
  std::optional<Timestamp> start_;
  Timestamp end_;
};

// The mutations accepted by `f`, in log order. The log is time-sorted, so the
// result is a contiguous view into `log`.
inline std::span<const Mutation> Filter(const Changelog& log,
                                        const TimeRangeFilter& f) {
  auto all = log.mutations();
  auto first = all.begin();
  if (f.start()) {
    first = std::upper_bound(all.begin(), all.end(), *f.start(),
                             [](Timestamp t, const Mutation& m) {
                               return t < m.time;
                             });
  }
  auto last = std::upper_bound(
      first, all.end(), f.end(),
      [](Timestamp t, const Mutation& m) { return t < m.time; });
  return {first, last};
}

// Merges the full mutation history of one new entry into `base`.
inline Changelog AdjacentChangelog(const Changelog& base,
                                   std::vector<Mutation> entry_muts) {
  if (entry_muts.empty()) {
    throw InvalidArgumentError("adjacent entry has no mutations");
  }
  const EntryId& id = entry_muts.front().entry;
  for (const auto& m : entry_muts) {
    if (m.entry != id) {
      throw InvalidArgumentError("adjacent mutations span several entries");
    }
  }
  if (base.contains_entry(id)) {
    throw DuplicateEntryError("entry '" + id + "' already in base changelog");
  }
  std::sort(entry_muts.begin(), entry_muts.end(), MutationOrder);
  Changelog own(entry_muts);  // validates the entry's chain
  std::vector<Mutation> merged;
  merged.reserve(base.size() + own.size());
  std::merge(base.begin(), base.end(), own.begin(), own.end(),
             std::back_inserter(merged), MutationOrder);
  return Changelog(std::move(merged));
}

// Removes every mutation of `id`. Inverse of AdjacentChangelog.
inline Changelog StripEntry(const Changelog& log, const EntryId& id) {
  std::vector<Mutation> kept;
  for (const auto& m : log) {
    if (m.entry != id) kept.push_back(m);
  }
  return Changelog(std::move(kept));
}

struct MutationConstraint;

struct AtMostK {
  std::int64_t k = 1;
  friend bool operator==(const AtMostK&, const AtMostK&) = default;
};

struct TimeBounded {
  Duration bound = 0;
  friend bool operator==(const TimeBounded&, const TimeBounded&) = default;
};

// An entry may follow any one of the listed constraints.
struct Hybrid {
  std::vector<MutationConstraint> options;
};

struct MutationConstraint {
  std::variant<AtMostK, TimeBounded, Hybrid> rule;

  static MutationConstraint MakeAtMostK(std::int64_t k) {
    if (k < 1) throw InvalidArgumentError("at-most-k needs k >= 1");
    return {AtMostK{k}};
  }
  static MutationConstraint MakeTimeBounded(Duration bound) {
    if (bound < 0) throw InvalidArgumentError("time bound must be >= 0");
    return {TimeBounded{bound}};
  }
  static MutationConstraint MakeHybrid(std::vector<MutationConstraint> options) {
    if (options.empty()) {
      throw InvalidArgumentError("hybrid constraint needs at least one option");
    }
    return {Hybrid{std::move(options)}};
  }

  bool is_hybrid() const { return std::holds_alternative<Hybrid>(rule); }
};

inline bool operator==(const Hybrid& a, const Hybrid& b);
inline bool operator==(const MutationConstraint& a,
                       const MutationConstraint& b) {
  return a.rule == b.rule;
}
inline bool operator==(const Hybrid& a, const Hybrid& b) {
  return a.options == b.options;
}

// Text form used by the CLI: "atmost:3", "bounded:7", or a comma list of
// those for a hybrid constraint.
inline std::string ToString(const MutationConstraint& c) {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AtMostK>) {
          return "atmost:" + std::to_string(r.k);
        } else if constexpr (std::is_same_v<T, TimeBounded>) {
          return "bounded:" + std::to_string(r.bound);
        } else {
          std::string out;
          for (const auto& o : r.options) {
            if (!out.empty()) out += ",";
            out += ToString(o);
          }
          return out;
        }
      },
      c.rule);
}

inline MutationConstraint ParseConstraint(const std::string& text) {
  std::vector<MutationConstraint> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw InvalidArgumentError("constraint '" + item +
                                 "' must look like atmost:K or bounded:B");
    }
    std::string kind = item.substr(0, colon);
    std::int64_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoll(item.substr(colon + 1), &used);
      if (used != item.size() - colon - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw InvalidArgumentError("constraint '" + item + "' has a bad number");
    }
    if (kind == "atmost") {
      parts.push_back(MutationConstraint::MakeAtMostK(value));
    } else if (kind == "bounded") {
      parts.push_back(MutationConstraint::MakeTimeBounded(value));
    } else {
      throw InvalidArgumentError("unknown constraint kind '" + kind + "'");
    }
  }
  if (parts.empty()) throw InvalidArgumentError("empty constraint");
  if (parts.size() == 1) return parts.front();
  return MutationConstraint::MakeHybrid(std::move(parts));
}

namespace internal {

struct EntryHistory {
  std::int64_t count = 0;
  Timestamp inserted = 0;
  Timestamp last = 0;
};

inline bool Satisfies(const EntryHistory& h, const MutationConstraint& c) {
  return std::visit(
      [&](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, AtMostK>) {
          return h.count <= r.k;
        } else if constexpr (std::is_same_v<T, TimeBounded>) {
          return h.last - h.inserted <= r.bound;
        } else {
          return std::any_of(r.options.begin(), r.options.end(),
                             [&](const auto& o) { return Satisfies(h, o); });
        }
      },
      c.rule);
}

}  // namespace internal

// Per-entry verdict. Deletions count as mutations; the time bound is anchored
// at the entry's first insertion.
inline std::map<EntryId, bool> ValidateConstraint(const Changelog& log,
                                                  const MutationConstraint& c) {
  std::map<EntryId, internal::EntryHistory> histories;
  for (const auto& m : log) {
    auto [it, fresh] = histories.try_emplace(m.entry);
    if (fresh) it->second.inserted = m.time;
    ++it->second.count;
    it->second.last = m.time;
  }
  std::map<EntryId, bool> verdict;
  for (const auto& [id, h] : histories) {
    verdict.emplace(id, internal::Satisfies(h, c));
  }
  return verdict;
}

inline bool SatisfiesConstraint(const Changelog& log,
                                const MutationConstraint& c) {
  auto verdict = ValidateConstraint(log, c);
  return std::all_of(verdict.begin(), verdict.end(),
                     [](const auto& kv) { return kv.second; });
}

}  // namespace cldp
