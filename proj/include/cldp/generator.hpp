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

// Synthetic dynamic databases that satisfy a declared mutation constraint by
// construction.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "cldp/changelog.hpp"
#include "cldp/errors.hpp"
#include "cldp/random.hpp"
#include "cldp/randomized_response.hpp"

namespace cldp {

struct GeneratorConfig {
  std::int64_t entries = 100;
  Duration horizon = 100;
  MutationConstraint constraint = MutationConstraint::MakeAtMostK(1);
  double value_min = 0.0;
  double value_max = 1.0;
  double mutation_rate = 0.5;  // chance of each optional extra mutation
  double deletion_rate = 0.25;  // chance the last extra mutation deletes
  std::uint64_t seed = 0;

  void Validate() const {
    if (entries < 1) throw ConfigError("generator.n_entries", "must be >= 1");
    if (horizon < 1) throw ConfigError("generator.horizon", "must be >= 1");
    if (!(value_min <= value_max)) {
      throw ConfigError("generator.value_range", "needs min <= max");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
      throw ConfigError("generator.mutation_rate", "must lie in [0, 1]");
    }
    if (!(deletion_rate >= 0.0 && deletion_rate <= 1.0)) {
      throw ConfigError("generator.deletion_rate", "must lie in [0, 1]");
    }
  }
};

namespace internal {

inline std::string EntryName(std::int64_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "e%06lld", static_cast<long long>(i));
  return buf;
}

// One concrete (non-hybrid) rule per entry; hybrids pick a branch uniformly.
inline const MutationConstraint& PickRule(const MutationConstraint& c,
                                          RandomStream& stream) {
  if (const auto* h = std::get_if<Hybrid>(&c.rule)) {
    return PickRule(h->options[stream.UniformIndex(h->options.size())], stream);
  }
  return c;
}

// Mutation times for one entry: its insertion time followed by strictly
// increasing extra times allowed by `rule`.
inline std::vector<Timestamp> EntryTimes(const GeneratorConfig& cfg,
                                         const MutationConstraint& rule,
                                         RandomStream& stream) {
  const Timestamp inserted =
      1 + static_cast<Timestamp>(stream.UniformIndex(static_cast<std::uint64_t>(cfg.horizon)));
  std::vector<Timestamp> times{inserted};
  if (const auto* k = std::get_if<AtMostK>(&rule.rule)) {
    std::vector<Timestamp> extra;
    const Duration room = cfg.horizon - inserted;
    for (std::int64_t i = 1; i < k->k && room > 0; ++i) {
      if (stream.Uniform() < cfg.mutation_rate) {
        extra.push_back(inserted + 1 +
                        static_cast<Timestamp>(stream.UniformIndex(static_cast<std::uint64_t>(room))));
      }
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    times.insert(times.end(), extra.begin(), extra.end());
  } else {
    const auto& tb = std::get<TimeBounded>(rule.rule);
    const Timestamp last = std::min(inserted + tb.bound, cfg.horizon);
    for (Timestamp t = inserted + 1; t <= last; ++t) {
      if (stream.Uniform() < cfg.mutation_rate) times.push_back(t);
    }
  }
  return times;
}

}  // namespace internal

inline Changelog GenerateChangelog(const GeneratorConfig& cfg) {
  cfg.Validate();
  const RandomStream root = RandomStream(cfg.seed).Substream("generate");
  auto value = [&](RandomStream& s) {
    const double raw = cfg.value_min + (cfg.value_max - cfg.value_min) * s.Uniform();
    return std::round(raw * 100.0) / 100.0;
  };
  std::vector<Mutation> muts;
  for (std::int64_t e = 0; e < cfg.entries; ++e) {
    RandomStream stream = root.Substream(static_cast<std::uint64_t>(e));
    const std::string id = internal::EntryName(e);
    const auto& rule = internal::PickRule(cfg.constraint, stream);
    const auto times = internal::EntryTimes(cfg, rule, stream);
    double current = value(stream);
    muts.push_back(Mutation::Insert(id, times[0], current));
    for (std::size_t i = 1; i < times.size(); ++i) {
      const bool last = i + 1 == times.size();
      if (last && stream.Uniform() < cfg.deletion_rate) {
        muts.push_back(Mutation::Delete(id, times[i], current));
      } else {
        const double next = value(stream);
        muts.push_back(Mutation::Modify(id, times[i], current, next));
        current = next;
      }
    }
  }
  std::sort(muts.begin(), muts.end(), MutationOrder);
  return Changelog(std::move(muts));
}

// Answer timelines with the same timing rules; each mutation switches to a
// different answer (or leaves, for a final deletion).
inline std::vector<AnswerRecord> GenerateAnswers(const GeneratorConfig& cfg,
                                                 const ResponseSpace& answers) {
  cfg.Validate();
  const RandomStream root = RandomStream(cfg.seed).Substream("generate-answers");
  const std::uint64_t z = answers.size();
  std::vector<AnswerRecord> records;
  for (std::int64_t e = 0; e < cfg.entries; ++e) {
    RandomStream stream = root.Substream(static_cast<std::uint64_t>(e));
    const std::string id = internal::EntryName(e);
    const auto& rule = internal::PickRule(cfg.constraint, stream);
    const auto times = internal::EntryTimes(cfg, rule, stream);
    std::uint64_t current = stream.UniformIndex(z);
    records.push_back({id, times[0], answers.label(current)});
    for (std::size_t i = 1; i < times.size(); ++i) {
      const bool last = i + 1 == times.size();
      if (last && stream.Uniform() < cfg.deletion_rate) {
        records.push_back({id, times[i], std::nullopt});
      } else {
        current = (current + 1 + stream.UniformIndex(z - 1)) % z;
        records.push_back({id, times[i], answers.label(current)});
      }
    }
  }
  std::sort(records.begin(), records.end(),
            [](const AnswerRecord& a, const AnswerRecord& b) {
              return std::tie(a.time, a.entry) < std::tie(b.time, b.entry);
            });
  return records;
}

}  // namespace cldp
