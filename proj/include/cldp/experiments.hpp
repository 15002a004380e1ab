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

// Equal-privacy comparison of a direct SWCR against the same windows
// aggregated from an HDCR: per-node epsilon is scaled so both releases reach
// the same accounted total loss, then per-window noise variance is measured
// by Monte Carlo on an empty changelog (noise is data independent).

#pragma once

#include <cstdint>
#include <vector>

#include "cldp/accountant.hpp"
#include "cldp/mechanisms.hpp"
#include "cldp/oracles.hpp"
#include "cldp/release.hpp"

namespace cldp {

struct WindowVarianceComparison {
  HdcrSwcrComparison predicate;
  HdcrParams hdcr;
  std::int64_t swcr_folds = 0;
  std::int64_t hdcr_folds = 0;
  double swcr_epsilon = 0.0;  // per query
  double hdcr_epsilon = 0.0;  // per node
  double total_epsilon = 0.0;
  // Mean over windows of the closed-form and Monte Carlo noise variance.
  double swcr_theory = 0.0;
  double hdcr_theory = 0.0;
  double swcr_empirical = 0.0;
  double hdcr_empirical = 0.0;
  std::int64_t trials = 0;
};

inline WindowVarianceComparison CompareWindowVariance(
    const SwcrParams& swcr, int branching, const MutationConstraint& constraint,
    double epsilon, double sensitivity, std::int64_t trials, std::uint64_t seed) {
  WindowVarianceComparison out;
  out.predicate = CompareHdcrSwcr(swcr, branching, constraint);
  out.hdcr = SwcrHdcrParams(swcr, branching);
  out.swcr_folds = SwcrFolds(swcr, constraint);
  out.hdcr_folds = HdcrFolds(out.hdcr, constraint);
  out.swcr_epsilon = epsilon;
  out.total_epsilon = KFold({epsilon, 0.0}, out.swcr_folds).epsilon;
  out.hdcr_epsilon = out.total_epsilon / static_cast<double>(out.hdcr_folds);
  out.trials = trials;

  const Changelog empty;
  const LinearQuerySpec spec(IdentityFn{}, 0.0, sensitivity);
  const NoiseSpec swcr_noise = LaplaceNoise(out.swcr_epsilon, sensitivity, 0);
  const NoiseSpec node_noise = LaplaceNoise(out.hdcr_epsilon, sensitivity, 0);

  out.swcr_theory = swcr_noise.variance();
  {
    const HdcrTree probe = BuildHdcr(empty, out.hdcr, spec, node_noise);
    for (const auto& r : DeriveSwcrFromHdcr(probe, swcr).records) {
      out.hdcr_theory += *r.variance / static_cast<double>(swcr.count);
    }
  }

  auto noisy = [](const ReleaseResult& r) {
    std::vector<double> v;
    v.reserve(r.records.size());
    for (const auto& rec : r.records) v.push_back(rec.noisy - rec.exact);
    return v;
  };
  const RandomStream root = RandomStream(seed).Substream("compare");
  const auto direct = oracles::MonteCarloVector(
      [&](RandomStream& s) {
        NoiseSpec n = swcr_noise;
        n.seed = s.NextU64();
        return noisy(RunSwcr(empty, swcr, spec, n));
      },
      trials, root.Substream("swcr").NextU64());
  const auto derived = oracles::MonteCarloVector(
      [&](RandomStream& s) {
        NoiseSpec n = node_noise;
        n.seed = s.NextU64();
        return noisy(DeriveSwcrFromHdcr(BuildHdcr(empty, out.hdcr, spec, n), swcr));
      },
      trials, root.Substream("hdcr").NextU64());
  for (std::int64_t i = 0; i < swcr.count; ++i) {
    out.swcr_empirical += direct.covariance[i][i] / static_cast<double>(swcr.count);
    out.hdcr_empirical += derived.covariance[i][i] / static_cast<double>(swcr.count);
  }
  return out;
}

}  // namespace cldp
