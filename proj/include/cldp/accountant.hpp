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

// Privacy-loss algebra and the closed-form bounds for disjoint (DCR),
// sliding-window (SWCR) and hierarchical (HDCR) continual releases.
//
// Every bound is "fold count times per-query loss": the number of queries a
// single entry can affect under its mutation constraint, composed
// sequentially. Hybrid constraints take the componentwise supremum of their
// branches.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "cldp/changelog.hpp"
#include "cldp/errors.hpp"

namespace cldp {

struct PrivacyLoss {
  double epsilon = 0.0;
  double delta = 0.0;

  static PrivacyLoss Make(double epsilon, double delta) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
      throw InvalidArgumentError("epsilon must be finite and >= 0");
    }
    if (!(delta >= 0.0 && delta <= 1.0)) {
      throw InvalidArgumentError("delta must lie in [0, 1]");
    }
    return {epsilon, delta};
  }

  friend bool operator==(const PrivacyLoss&, const PrivacyLoss&) = default;
};

// Componentwise partial order.
inline bool Precedes(const PrivacyLoss& a, const PrivacyLoss& b) {
  return a.epsilon <= b.epsilon && a.delta <= b.delta;
}

// Least upper bound under Precedes.
inline PrivacyLoss Sup(const PrivacyLoss& a, const PrivacyLoss& b) {
  return {std::max(a.epsilon, b.epsilon), std::max(a.delta, b.delta)};
}

inline PrivacyLoss Sup(std::span<const PrivacyLoss> losses) {
  PrivacyLoss out;
  for (const auto& l : losses) out = Sup(out, l);
  return out;
}

struct NaiveComposition {};

// Homogeneous k-fold advanced composition with slack delta.
struct AdvancedComposition {
  double delta_slack = 1e-6;
};

using CompositionStrategy = std::variant<NaiveComposition, AdvancedComposition>;

// k-fold composition of one loss. k = 0 composes nothing and is (0, 0).
inline PrivacyLoss KFold(const PrivacyLoss& loss, std::int64_t k,
                         const CompositionStrategy& s = NaiveComposition{}) {
  if (k < 0) throw InvalidArgumentError("fold count must be >= 0");
  if (k == 0) return {};
  const double kd = static_cast<double>(k);
  if (const auto* adv = std::get_if<AdvancedComposition>(&s)) {
    if (!(adv->delta_slack > 0.0 && adv->delta_slack < 1.0)) {
      throw InvalidArgumentError("advanced composition slack must be in (0,1)");
    }
    const double eps = loss.epsilon * std::sqrt(2.0 * kd * std::log(1.0 / adv->delta_slack)) +
                       kd * loss.epsilon * std::expm1(loss.epsilon);
    return {eps, std::min(1.0, kd * loss.delta + adv->delta_slack)};
  }
  return {kd * loss.epsilon, std::min(1.0, kd * loss.delta)};
}

// Sequential composition of a list of losses.
inline PrivacyLoss Compose(std::span<const PrivacyLoss> losses,
                           const CompositionStrategy& s = NaiveComposition{}) {
  if (losses.empty()) throw InvalidArgumentError("compose needs a loss");
  if (std::holds_alternative<AdvancedComposition>(s)) {
    for (const auto& l : losses) {
      if (!(l == losses.front())) {
        throw HeterogeneousAdvancedError(
            "advanced composition only supports identical losses");
      }
    }
    return KFold(losses.front(), static_cast<std::int64_t>(losses.size()), s);
  }
  PrivacyLoss out;
  for (const auto& l : losses) {
    out.epsilon += l.epsilon;
    out.delta += l.delta;
  }
  out.delta = std::min(1.0, out.delta);
  return out;
}

// Strictly ascending right endpoints t_1 < t_2 < ... of consecutive filters
// (-inf, t_1], (t_1, t_2], ...
class ReleaseSchedule {
 public:
  explicit ReleaseSchedule(std::vector<Timestamp> endpoints)
      : endpoints_(std::move(endpoints)) {
    if (endpoints_.empty()) {
      throw InvalidArgumentError("release schedule needs an endpoint");
    }
    for (std::size_t i = 1; i < endpoints_.size(); ++i) {
      if (endpoints_[i] <= endpoints_[i - 1]) {
        throw InvalidArgumentError("release schedule must strictly ascend");
      }
    }
  }

  // t_1 + W * [0, n).
  static ReleaseSchedule Uniform(Timestamp first, Duration interval,
                                 std::int64_t count) {
    if (interval < 1 || count < 1) {
      throw InvalidArgumentError("uniform schedule needs W >= 1 and n >= 1");
    }
    std::vector<Timestamp> t(static_cast<std::size_t>(count));
    for (std::int64_t i = 0; i < count; ++i) t[i] = first + i * interval;
    return ReleaseSchedule(std::move(t));
  }

  std::span<const Timestamp> endpoints() const { return endpoints_; }
  std::size_t size() const { return endpoints_.size(); }

  // Filter of query i: (-inf, t_1] for i = 0, else (t_{i-1}, t_i].
  TimeRangeFilter filter(std::size_t i) const {
    if (i == 0) return TimeRangeFilter::UpTo(endpoints_[0]);
    return {endpoints_[i - 1], endpoints_[i]};
  }

  std::vector<TimeRangeFilter> filters() const {
    std::vector<TimeRangeFilter> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.push_back(filter(i));
    return out;
  }

 private:
  std::vector<Timestamp> endpoints_;
};

struct SwcrParams {
  Duration period = 1;
  Duration window = 1;
  Timestamp first_end = 0;
  std::int64_t count = 1;

  void Validate() const {
    if (period < 1) throw InvalidArgumentError("SWCR period P must be >= 1");
    if (window < 1) throw InvalidArgumentError("SWCR window W must be >= 1");
    if (count < 1) throw InvalidArgumentError("SWCR needs n >= 1 queries");
  }

  Timestamp right_end(std::int64_t i) const { return first_end + i * period; }

  // Window of query i: (t_i - W, t_i].
  TimeRangeFilter filter(std::int64_t i) const {
    return {right_end(i) - window, right_end(i)};
  }

  std::vector<TimeRangeFilter> filters() const {
    Validate();
    std::vector<TimeRangeFilter> out;
    for (std::int64_t i = 0; i < count; ++i) out.push_back(filter(i));
    return out;
  }
};

struct HdcrParams {
  int height = 1;
  int branching = 2;
  Timestamp start = 0;
  Duration span = 1;
  Duration width = 1;

  void Validate() const {
    if (height < 1) throw InvalidArgumentError("HDCR height h must be >= 1");
    if (branching < 2) throw InvalidArgumentError("HDCR branching c must be >= 2");
    if (span < 1) throw InvalidArgumentError("HDCR span T must be >= 1");
    if (width < 1) throw InvalidArgumentError("HDCR width W must be >= 1");
  }

  // c^i * W.
  Duration layer_interval(int layer) const {
    Duration len = width;
    for (int i = 0; i < layer; ++i) len *= branching;
    return len;
  }

  // ceil(T / (c^i W)).
  std::int64_t layer_size(int layer) const {
    const Duration len = layer_interval(layer);
    return (span + len - 1) / len;
  }

  // Endpoints t_s + c^i W * [1, ceil(T / (c^i W))].
  ReleaseSchedule layer_schedule(int layer) const {
    return ReleaseSchedule::Uniform(start + layer_interval(layer),
                                    layer_interval(layer), layer_size(layer));
  }
};

inline std::int64_t CeilDiv(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

// Maximum number of consecutive ranges overlapped by a sliding window of
// length T, computed exactly as the reference O(n^2) scan: for each start
// endpoint, the first later endpoint at distance >= T closes a span.
inline std::int64_t MostSpanReference(std::span<const Timestamp> t,
                                      Duration window) {
  std::int64_t res = 0;
  const std::int64_t n = static_cast<std::int64_t>(t.size());
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      if (t[j] - t[i] >= window) {
        res = std::max(res, j - i + 1);
        break;
      }
    }
  }
  return res;
}

// Same value as MostSpanReference in O(n): the closing index only moves
// forward as the start index advances.
inline std::int64_t MostSpan(std::span<const Timestamp> t, Duration window) {
  std::int64_t res = 0;
  const std::int64_t n = static_cast<std::int64_t>(t.size());
  std::int64_t j = 1;
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    j = std::max(j, i + 1);
    while (j < n && t[j] - t[i] < window) ++j;
    if (j == n) break;
    res = std::max(res, j - i + 1);
  }
  return res;
}

inline std::int64_t MostSpan(const ReleaseSchedule& s, Duration window) {
  return MostSpan(s.endpoints(), window);
}

// Exact maximum number of DCR ranges (-inf, t_1], (t_1, t_2], ..., (t_{n-1},
// t_n] touched by mutations confined to a closed window [s, s + B] of integer
// ticks. Unlike MostSpan it counts the single range a B = 0 window touches
// and the ranges touched by a window running past t_n.
inline std::int64_t MaxAffectedRanges(std::span<const Timestamp> t,
                                      Duration bound) {
  const std::int64_t n = static_cast<std::int64_t>(t.size());
  std::int64_t res = 0;
  std::int64_t j = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    // The best window starting inside range i starts at its last tick t_i.
    j = std::max(j, i);
    while (j < n - 1 && t[j] < t[i] + bound) ++j;
    res = std::max(res, j - i + 1);
  }
  return res;
}

inline std::int64_t MaxAffectedRanges(const ReleaseSchedule& s,
                                      Duration bound) {
  return MaxAffectedRanges(s.endpoints(), bound);
}

namespace internal {

template <typename FoldFn>
std::int64_t MaxOverBranches(const MutationConstraint& c, FoldFn&& fold) {
  return std::visit(
      [&](const auto& r) -> std::int64_t {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Hybrid>) {
          std::int64_t best = 0;
          for (const auto& o : r.options) {
            best = std::max(best, MaxOverBranches(o, fold));
          }
          return best;
        } else {
          return fold(r);
        }
      },
      c.rule);
}

template <typename FoldFn>
PrivacyLoss BoundOverBranches(const MutationConstraint& c, const PrivacyLoss& loss,
                              const CompositionStrategy& s, FoldFn&& fold) {
  if (const auto* h = std::get_if<Hybrid>(&c.rule)) {
    PrivacyLoss out;
    for (const auto& o : h->options) {
      out = Sup(out, BoundOverBranches(o, loss, s, fold));
    }
    return out;
  }
  return KFold(loss, MaxOverBranches(c, fold), s);
}

}  // namespace internal

// Queries of a DCR one entry can affect.
inline std::int64_t DcrFolds(const ReleaseSchedule& schedule,
                             const MutationConstraint& c) {
  return internal::MaxOverBranches(c, [&](const auto& r) -> std::int64_t {
    using T = std::decay_t<decltype(r)>;
    if constexpr (std::is_same_v<T, AtMostK>) {
      return r.k;
    } else {
      return MaxAffectedRanges(schedule, r.bound);
    }
  });
}

inline std::int64_t SwcrFolds(const SwcrParams& p, const MutationConstraint& c) {
  p.Validate();
  return internal::MaxOverBranches(c, [&](const auto& r) -> std::int64_t {
    using T = std::decay_t<decltype(r)>;
    if constexpr (std::is_same_v<T, AtMostK>) {
      return r.k * CeilDiv(p.window, p.period);
    } else {
      return CeilDiv(r.bound + p.window, p.period);
    }
  });
}

// h*k for at-most-k; for time-bounded, the exact per-layer count summed over
// layers.
inline std::int64_t HdcrFolds(const HdcrParams& p, const MutationConstraint& c) {
  p.Validate();
  return internal::MaxOverBranches(c, [&](const auto& r) -> std::int64_t {
    using T = std::decay_t<decltype(r)>;
    if constexpr (std::is_same_v<T, AtMostK>) {
      return static_cast<std::int64_t>(p.height) * r.k;
    } else {
      std::int64_t total = 0;
      for (int i = 0; i < p.height; ++i) {
        total += MaxAffectedRanges(p.layer_schedule(i), r.bound);
      }
      return total;
    }
  });
}

// The closed-form time-bounded HDCR term sum_{i<h} (ceil(B/W) / c^i + 1).
// Reported next to HdcrFolds; it can undercut the exact per-layer count.
inline double HdcrClosedFormTimeBoundedFolds(const HdcrParams& p,
                                             Duration bound) {
  double total = 0.0;
  const double base = static_cast<double>(CeilDiv(bound, p.width));
  for (int i = 0; i < p.height; ++i) {
    total += base / std::pow(static_cast<double>(p.branching), i) + 1.0;
  }
  return total;
}

inline PrivacyLoss DcrBound(const ReleaseSchedule& schedule,
                            const PrivacyLoss& per_query,
                            const MutationConstraint& c,
                            const CompositionStrategy& s = NaiveComposition{}) {
  return internal::BoundOverBranches(c, per_query, s, [&](const auto& r) {
    return DcrFolds(schedule, MutationConstraint{r});
  });
}

inline PrivacyLoss SwcrBound(const SwcrParams& p, const PrivacyLoss& per_query,
                             const MutationConstraint& c,
                             const CompositionStrategy& s = NaiveComposition{}) {
  return internal::BoundOverBranches(c, per_query, s, [&](const auto& r) {
    return SwcrFolds(p, MutationConstraint{r});
  });
}

inline PrivacyLoss HdcrBound(const HdcrParams& p, const PrivacyLoss& per_node,
                             const MutationConstraint& c,
                             const CompositionStrategy& s = NaiveComposition{}) {
  return internal::BoundOverBranches(c, per_node, s, [&](const auto& r) {
    return HdcrFolds(p, MutationConstraint{r});
  });
}

// Local DP against a single entry's changelog doubles the global fold count.
inline std::int64_t LocalFolds(std::int64_t global_folds) {
  if (global_folds < 0) throw InvalidArgumentError("fold count must be >= 0");
  return 2 * global_folds;
}

inline PrivacyLoss LocalBound(std::int64_t global_folds,
                              const PrivacyLoss& per_query,
                              const CompositionStrategy& s = NaiveComposition{}) {
  return KFold(per_query, LocalFolds(global_folds), s);
}

// |q|x|: how many of `filters` see a different input once the entry's
// mutations are merged into `base`.
inline std::int64_t AffectedQueryCount(const Changelog& base,
                                       std::vector<Mutation> entry_muts,
                                       std::span<const TimeRangeFilter> filters) {
  if (entry_muts.empty()) return 0;
  const Changelog adjacent = AdjacentChangelog(base, std::move(entry_muts));
  std::int64_t affected = 0;
  for (const auto& f : filters) {
    if (Filter(adjacent, f).size() != Filter(base, f).size()) ++affected;
  }
  return affected;
}

}  // namespace cldp
