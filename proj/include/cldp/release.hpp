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

// Release engines: disjoint (DCR), sliding-window (SWCR) and hierarchical
// (HDCR) continual releases of linear-query changes, range covers over HDCR
// nodes, and SWCR answers aggregated from an HDCR.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "cldp/accountant.hpp"
#include "cldp/changelog.hpp"
#include "cldp/errors.hpp"
#include "cldp/mechanisms.hpp"
#include "cldp/random.hpp"

namespace cldp {

// One released query. `exact` is the un-noised value; it stays in memory for
// verification and is only serialized on explicit request.
struct ReleaseRecord {
  TimeRangeFilter filter;
  double exact = 0.0;
  double noisy = 0.0;
  std::optional<std::int64_t> node_count;  // set for HDCR aggregates
  std::optional<double> variance;          // set for HDCR aggregates
};

struct ReleaseResult {
  std::vector<ReleaseRecord> records;
};

inline ReleaseResult RunDcr(const Changelog& log, const ReleaseSchedule& schedule,
                            const LinearQuerySpec& spec, const NoiseSpec& noise) {
  noise.Validate();
  const RandomStream root = RandomStream(noise.seed).Substream("dcr");
  ReleaseResult out;
  out.records.reserve(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const TimeRangeFilter f = schedule.filter(i);
    const double exact = LinearQueryChange(Filter(log, f), spec);
    RandomStream stream = root.Substream(i);
    out.records.push_back({f, exact, Perturb(exact, noise, stream), {}, {}});
  }
  return out;
}

inline ReleaseResult RunSwcr(const Changelog& log, const SwcrParams& p,
                             const LinearQuerySpec& spec, const NoiseSpec& noise) {
  p.Validate();
  noise.Validate();
  const RandomStream root = RandomStream(noise.seed).Substream("swcr");
  ReleaseResult out;
  out.records.reserve(static_cast<std::size_t>(p.count));
  for (std::int64_t i = 0; i < p.count; ++i) {
    const TimeRangeFilter f = p.filter(i);
    const double exact = LinearQueryChange(Filter(log, f), spec);
    RandomStream stream = root.Substream(static_cast<std::uint64_t>(i));
    out.records.push_back({f, exact, Perturb(exact, noise, stream), {}, {}});
  }
  return out;
}

struct NodeId {
  int layer = 0;
  std::int64_t index = 0;
  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Disjoint HDCR nodes whose union is exactly the requested range, in units of
// the bottom interval W. Node (layer m, index j) spans (j c^m, (j+1) c^m].
struct RangeCover {
  std::vector<NodeId> nodes;
  std::size_t size() const { return nodes.size(); }
};

namespace internal {

inline std::vector<std::int64_t> Powers(int branching, int height) {
  std::vector<std::int64_t> pow(static_cast<std::size_t>(height) + 1, 1);
  for (int k = 1; k <= height; ++k) {
    if (pow[k - 1] > (std::int64_t{1} << 52) / branching) {
      throw InvalidArgumentError("c^h overflows the supported range");
    }
    pow[k] = pow[k - 1] * branching;
  }
  return pow;
}

}  // namespace internal

// Covers (l, r] by splitting at the position i in [l, r] aligned to the
// highest layer available, then decomposing (i, r] and (l, i] greedily into
// the largest aligned nodes (base-c digits on each side).
inline RangeCover CoverRange(std::int64_t l, std::int64_t r, int branching,
                             int height) {
  if (branching < 2 || height < 1) {
    throw InvalidArgumentError("cover needs c >= 2 and h >= 1");
  }
  if (l < 0 || l >= r) throw InvalidArgumentError("cover needs 0 <= l < r");
  const auto pow = internal::Powers(branching, height);
  if (r - l > pow[height]) {
    throw RangeTooWideError("range (" + std::to_string(l) + ", " +
                            std::to_string(r) + "] is wider than c^h = " +
                            std::to_string(pow[height]));
  }
  std::int64_t split = l;
  for (int j = height - 1; j >= 0; --j) {
    const std::int64_t aligned = CeilDiv(l, pow[j]) * pow[j];
    if (aligned <= r) {
      split = aligned;
      break;
    }
  }
  RangeCover cover;
  for (std::int64_t p = split; p < r;) {
    int m = height - 1;
    while (p % pow[m] != 0 || p + pow[m] > r) --m;
    cover.nodes.push_back({m, p / pow[m]});
    p += pow[m];
  }
  for (std::int64_t p = split; p > l;) {
    int m = height - 1;
    while (p % pow[m] != 0 || p - pow[m] < l) --m;
    cover.nodes.push_back({m, p / pow[m] - 1});
    p -= pow[m];
  }
  std::sort(cover.nodes.begin(), cover.nodes.end(),
            [&](const NodeId& a, const NodeId& b) {
              return a.index * pow[a.layer] < b.index * pow[b.layer];
            });
  return cover;
}

struct HdcrNode {
  TimeRangeFilter filter;
  double exact = 0.0;
  double noisy = 0.0;
};

// Layer i holds ceil(T / (c^i W)) nodes; node j spans
// (t_s + j c^i W, min(t_s + (j+1) c^i W, t_s + T)].
struct HdcrTree {
  HdcrParams params;
  NoiseSpec noise;
  std::vector<std::vector<HdcrNode>> layers;

  const HdcrNode& node(const NodeId& id) const {
    return layers.at(static_cast<std::size_t>(id.layer))
        .at(static_cast<std::size_t>(id.index));
  }
  std::size_t node_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.size();
    return n;
  }
};

inline TimeRangeFilter HdcrNodeFilter(const HdcrParams& p, const NodeId& id) {
  const Duration len = p.layer_interval(id.layer);
  const Timestamp begin = p.start + id.index * len;
  return {begin, std::min(begin + len, p.start + p.span)};
}

inline HdcrTree BuildHdcr(const Changelog& log, const HdcrParams& p,
                          const LinearQuerySpec& spec,
                          const NoiseSpec& noise_per_node) {
  p.Validate();
  noise_per_node.Validate();
  internal::Powers(p.branching, p.height);
  const RandomStream root = RandomStream(noise_per_node.seed).Substream("hdcr");
  HdcrTree tree{p, noise_per_node, {}};
  tree.layers.resize(static_cast<std::size_t>(p.height));
  for (int layer = 0; layer < p.height; ++layer) {
    const RandomStream layer_root = root.Substream(static_cast<std::uint64_t>(layer));
    const std::int64_t n = p.layer_size(layer);
    auto& nodes = tree.layers[static_cast<std::size_t>(layer)];
    nodes.reserve(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
      const TimeRangeFilter f = HdcrNodeFilter(p, {layer, j});
      const double exact = LinearQueryChange(Filter(log, f), spec);
      RandomStream stream = layer_root.Substream(static_cast<std::uint64_t>(j));
      nodes.push_back({f, exact, Perturb(exact, noise_per_node, stream)});
    }
  }
  return tree;
}

struct Aggregate {
  double noisy = 0.0;
  double exact = 0.0;
  std::int64_t node_count = 0;
  double variance = 0.0;
};

// Sums the cover of (l W, r W] (relative to t_s). Variance is
// node_count * 2 (s / eps')^2.
inline Aggregate AggregateRange(const HdcrTree& tree, std::int64_t l,
                                std::int64_t r) {
  const auto& p = tree.params;
  if (r > p.layer_size(0)) {
    throw InvalidArgumentError("aggregate range ends past the HDCR span");
  }
  const RangeCover cover = CoverRange(l, r, p.branching, p.height);
  Aggregate out;
  for (const auto& id : cover.nodes) {
    const HdcrNode& n = tree.node(id);
    out.noisy += n.noisy;
    out.exact += n.exact;
  }
  out.node_count = static_cast<std::int64_t>(cover.size());
  out.variance = static_cast<double>(out.node_count) * tree.noise.variance();
  return out;
}

// Smallest h >= 1 with c^h >= ratio, i.e. ceil(log_c ratio) clamped to 1.
inline int CeilLogHeight(std::int64_t ratio, int branching) {
  int h = 0;
  std::int64_t reach = 1;
  while (reach < ratio) {
    reach *= branching;
    ++h;
  }
  return std::max(h, 1);
}

// HDCR(h, c, t_1 - W, W + (n-1) P, gcd(W, P)) whose nodes answer every window.
inline HdcrParams SwcrHdcrParams(const SwcrParams& swcr, int branching) {
  swcr.Validate();
  const Duration unit = std::gcd(swcr.window, swcr.period);
  HdcrParams p;
  p.height = CeilLogHeight(swcr.window / unit, branching);
  p.branching = branching;
  p.start = swcr.first_end - swcr.window;
  p.span = swcr.window + (swcr.count - 1) * swcr.period;
  p.width = unit;
  p.Validate();
  return p;
}

// Answers each window of `swcr` by aggregating nodes of the matching HDCR.
inline ReleaseResult DeriveSwcrFromHdcr(const HdcrTree& tree,
                                        const SwcrParams& swcr) {
  const Duration unit = tree.params.width;
  ReleaseResult out;
  out.records.reserve(static_cast<std::size_t>(swcr.count));
  for (std::int64_t i = 0; i < swcr.count; ++i) {
    const std::int64_t l = i * swcr.period / unit;
    const std::int64_t r = l + swcr.window / unit;
    const Aggregate agg = AggregateRange(tree, l, r);
    out.records.push_back(
        {swcr.filter(i), agg.exact, agg.noisy, agg.node_count, agg.variance});
  }
  return out;
}

inline ReleaseResult DeriveSwcrFromHdcr(const Changelog& log,
                                        const SwcrParams& swcr, int branching,
                                        const LinearQuerySpec& spec,
                                        const NoiseSpec& noise_per_node) {
  const HdcrParams p = SwcrHdcrParams(swcr, branching);
  return DeriveSwcrFromHdcr(BuildHdcr(log, p, spec, noise_per_node), swcr);
}

struct HdcrSwcrComparison {
  double lhs = 0.0;
  double rhs = 0.0;
  bool hdcr_wins = false;
  // eps' / eps giving the HDCR the same total loss as the SWCR.
  double epsilon_prime_factor = 0.0;
  int height = 1;
};

// Evaluates the pure-epsilon variance predicate
//   at-most-k:    2(c-1) h^3 < ceil(W/P)^2
//   time-bounded: 2(c-1) h (rho ceil(B/dT) + h)^2 < ceil((W+B)/P)^2,
//                 rho = (c^h - 1) / (c^h - c^{h-1})
// with h = max(1, ceil(log_c(W/dT))), dT = gcd(W, P). The comparison itself
// is done in exact integer arithmetic.
inline HdcrSwcrComparison CompareHdcrSwcr(const SwcrParams& swcr, int branching,
                                          const MutationConstraint& constraint) {
  swcr.Validate();
  if (branching < 2) throw InvalidArgumentError("branching c must be >= 2");
  const Duration unit = std::gcd(swcr.window, swcr.period);
  const int h = CeilLogHeight(swcr.window / unit, branching);
  const auto pow = internal::Powers(branching, h);
  using Wide = __int128;
  const Wide c = branching;
  HdcrSwcrComparison out;
  out.height = h;
  if (const auto* k = std::get_if<AtMostK>(&constraint.rule)) {
    (void)k;
    const Wide lhs = 2 * (c - 1) * h * h * h;
    const Wide rhs_root = CeilDiv(swcr.window, swcr.period);
    const Wide rhs = rhs_root * rhs_root;
    out.lhs = static_cast<double>(lhs);
    out.rhs = static_cast<double>(rhs);
    out.hdcr_wins = lhs < rhs;
    out.epsilon_prime_factor =
        static_cast<double>(rhs_root) / static_cast<double>(h);
    return out;
  }
  if (const auto* tb = std::get_if<TimeBounded>(&constraint.rule)) {
    const Wide denom = pow[h] - pow[h - 1];
    const Wide numer = (pow[h] - 1) * Wide{CeilDiv(tb->bound, unit)} + Wide{h} * denom;
    const Wide rhs_root = CeilDiv(swcr.window + tb->bound, swcr.period);
    const Wide lhs_scaled = 2 * (c - 1) * h * numer * numer;  // lhs * denom^2
    const Wide rhs_scaled = rhs_root * rhs_root * denom * denom;
    const double term = static_cast<double>(numer) / static_cast<double>(denom);
    out.lhs = 2.0 * static_cast<double>(branching - 1) * h * term * term;
    out.rhs = static_cast<double>(rhs_root * rhs_root);
    out.hdcr_wins = lhs_scaled < rhs_scaled;
    out.epsilon_prime_factor = static_cast<double>(rhs_root) / term;
    return out;
  }
  throw UnsupportedConstraintError(
      "HDCR/SWCR comparison is defined for at-most-k or time-bounded only");
}

}  // namespace cldp
