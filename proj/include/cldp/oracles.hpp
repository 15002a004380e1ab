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

// Brute-force reference computations. Nothing here calls the engine paths it
// is used to check: snapshots are folded by hand, filter membership is tested
// mutation by mutation, covers are minimized by dynamic programming, and
// statistical checks come from plain Monte Carlo moments.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cldp/changelog.hpp"
#include "cldp/mechanisms.hpp"
#include "cldp/random.hpp"

namespace cldp::oracles {

struct OracleReport {
  std::string name;
  std::string instance;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;  // 0: exact
  bool pass = false;
};

inline OracleReport MakeReport(std::string name, std::string instance,
                               double expected, double actual,
                               double tolerance = 0.0) {
  const bool pass = tolerance == 0.0 ? expected == actual
                                     : std::fabs(expected - actual) <= tolerance;
  return {std::move(name), std::move(instance), expected, actual, tolerance, pass};
}

// Report for a predicate that should hold (expected 1, actual 1/0).
inline OracleReport MakeCheck(std::string name, std::string instance, bool ok) {
  return MakeReport(std::move(name), std::move(instance), 1.0, ok ? 1.0 : 0.0);
}

// sum f(x) over the database state at t, rebuilt by folding the log by hand.
inline double SnapshotOracle(const Changelog& log, Timestamp t,
                             const LinearQuerySpec& spec) {
  std::map<EntryId, double> state;
  for (const auto& m : log) {
    if (m.time > t) break;
    if (m.next) {
      state[m.entry] = *m.next;
    } else {
      state.erase(m.entry);
    }
  }
  double total = 0.0;
  for (const auto& [id, value] : state) total += spec.Contribution(value);
  return total;
}

// Fewest aligned nodes (layer m spans (j c^m, (j+1) c^m], m < h) whose
// disjoint union is exactly (l, r].
inline std::int64_t MinCoverOracle(std::int64_t l, std::int64_t r, int branching,
                                   int height) {
  const std::int64_t width = r - l;
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 2;
  std::vector<std::int64_t> best(static_cast<std::size_t>(width) + 1, kInf);
  best[0] = 0;
  for (std::int64_t y = l + 1; y <= r; ++y) {
    std::int64_t size = 1;
    for (int m = 0; m < height; ++m, size *= branching) {
      if (y % size != 0 || y - size < l) break;
      best[y - l] = std::min(best[y - l], best[y - size - l] + 1);
    }
  }
  return best[width];
}

// Number of filters that accept at least one of the entry's mutations.
inline std::int64_t AffectedCountOracle(std::span<const TimeRangeFilter> filters,
                                        std::span<const Mutation> entry_muts) {
  std::int64_t count = 0;
  for (const auto& f : filters) {
    bool hit = false;
    for (const auto& m : entry_muts) {
      const bool after_start = !f.start().has_value() || m.time > *f.start();
      if (after_start && m.time <= f.end()) {
        hit = true;
        break;
      }
    }
    if (hit) ++count;
  }
  return count;
}

// Max DCR ranges (-inf, t_1], (t_1, t_2], ... touched by a closed tick window
// [s, s + B], by trying every start s.
inline std::int64_t MaxRangesTouchedOracle(std::span<const Timestamp> t,
                                           Duration bound) {
  std::int64_t best = 0;
  for (Timestamp s = t.front() - bound - 1; s <= t.back(); ++s) {
    std::int64_t touched = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const Timestamp lo = i == 0 ? std::numeric_limits<Timestamp>::min() : t[i - 1] + 1;
      if (lo <= s + bound && s <= t[i]) ++touched;
    }
    best = std::max(best, touched);
  }
  return best;
}

// Checks sum_{i in S} p(i,a) <= e^eps sum_{i in S} p(i,b) over every row
// subset S and column pair. p is column-major: p[j][i] = Pr[i | j].
inline bool VerifyDpBySubsets(const std::vector<std::vector<double>>& p,
                              double epsilon) {
  const std::size_t n = p.size();
  const double factor = std::exp(epsilon) * (1.0 + 1e-12);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        double pa = 0.0, pb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask & (std::uint64_t{1} << i)) {
            pa += p[a][i];
            pb += p[b][i];
          }
        }
        if (pa > factor * pb) return false;
      }
    }
  }
  return true;
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

using ScalarSampler = std::function<double(RandomStream&)>;
using VectorSampler = std::function<std::vector<double>(RandomStream&)>;

// Trial t draws from RandomStream(seed).Substream(t), so results do not
// depend on evaluation order.
inline McEstimate MonteCarloMean(const ScalarSampler& sampler,
                                 std::int64_t trials, std::uint64_t seed) {
  const RandomStream root(seed);
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    RandomStream stream = root.Substream(static_cast<std::uint64_t>(t));
    const double x = sampler(stream);
    const double d = x - mean;
    mean += d / static_cast<double>(t + 1);
    m2 += d * (x - mean);
  }
  const double var = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
  return {mean, std::sqrt(var / static_cast<double>(trials)), trials};
}

// Unbiased sample variance; stderr from the fourth central moment.
inline McEstimate MonteCarloVariance(const ScalarSampler& sampler,
                                     std::int64_t trials, std::uint64_t seed) {
  const RandomStream root(seed);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(trials));
  double sum = 0.0;
  for (std::int64_t t = 0; t < trials; ++t) {
    RandomStream stream = root.Substream(static_cast<std::uint64_t>(t));
    xs.push_back(sampler(stream));
    sum += xs.back();
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : xs) {
    const double d2 = (x - mean) * (x - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  const double var = m2 / (n - 1.0);
  const double mu4 = m4 / n;
  const double se = std::sqrt(std::max(0.0, (mu4 - var * var * (n - 3.0) / (n - 1.0)) / n));
  return {var, se, trials};
}

struct McVectorEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<std::vector<double>> covariance;
  std::int64_t trials = 0;
};

inline McVectorEstimate MonteCarloVector(const VectorSampler& sampler,
                                         std::int64_t trials, std::uint64_t seed) {
  const RandomStream root(seed);
  McVectorEstimate out;
  out.trials = trials;
  std::vector<std::vector<double>> samples;
  samples.reserve(static_cast<std::size_t>(trials));
  for (std::int64_t t = 0; t < trials; ++t) {
    RandomStream stream = root.Substream(static_cast<std::uint64_t>(t));
    samples.push_back(sampler(stream));
  }
  const std::size_t dim = samples.empty() ? 0 : samples.front().size();
  const double n = static_cast<double>(trials);
  out.mean.assign(dim, 0.0);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < dim; ++i) out.mean[i] += s[i] / n;
  }
  out.covariance.assign(dim, std::vector<double>(dim, 0.0));
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        out.covariance[i][j] += (s[i] - out.mean[i]) * (s[j] - out.mean[j]) / (n - 1.0);
      }
    }
  }
  out.std_error.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    out.std_error[i] = std::sqrt(out.covariance[i][i] / n);
  }
  return out;
}

}  // namespace cldp::oracles
