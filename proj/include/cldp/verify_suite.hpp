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

// The oracle suite behind `cldp verify`: every check pits an engine result
// against an independent oracle from oracles.hpp.

#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "cldp/accountant.hpp"
#include "cldp/generator.hpp"
#include "cldp/mechanisms.hpp"
#include "cldp/oracles.hpp"
#include "cldp/randomized_response.hpp"
#include "cldp/release.hpp"

namespace cldp {

enum class InjectedFault {
  kNone,
  kCoverOffByOne,  // covers (l, r - 1] instead of (l, r]
};

struct VerifyOptions {
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  InjectedFault fault = InjectedFault::kNone;
};

namespace internal {

inline RangeCover CoverForVerify(std::int64_t l, std::int64_t r, int c, int h,
                                 InjectedFault fault) {
  if (fault == InjectedFault::kCoverOffByOne && r - l > 1) {
    return CoverRange(l, r - 1, c, h);
  }
  return CoverRange(l, r, c, h);
}

// Disjoint nodes whose union is exactly (l, r].
inline bool CoverIsExact(const RangeCover& cover, std::int64_t l,
                         std::int64_t r, int c) {
  std::vector<int> hits(static_cast<std::size_t>(r - l), 0);
  for (const auto& id : cover.nodes) {
    std::int64_t size = 1;
    for (int i = 0; i < id.layer; ++i) size *= c;
    for (std::int64_t x = id.index * size; x < (id.index + 1) * size; ++x) {
      if (x < l || x >= r) return false;
      ++hits[static_cast<std::size_t>(x - l)];
    }
  }
  for (int h : hits) {
    if (h != 1) return false;
  }
  return true;
}

inline std::int64_t CeilLog(std::int64_t x, int c) {
  std::int64_t k = 0, reach = 1;
  while (reach < x) {
    reach *= c;
    ++k;
  }
  return k;
}

}  // namespace internal

// Relative tolerance for Monte Carlo variances: 10% at 10^4 trials, shrinking
// with the standard error as trials grow.
inline double VarianceTolerance(std::int64_t trials) {
  return 0.1 * std::sqrt(10000.0 / static_cast<double>(trials));
}

inline std::vector<oracles::OracleReport> RunVerifySuite(const VerifyOptions& opt) {
  using oracles::MakeCheck;
  using oracles::MakeReport;
  if (opt.trials < 100) throw InvalidArgumentError("verify needs >= 100 trials");
  std::vector<oracles::OracleReport> reports;
  const double rel_tol = VarianceTolerance(opt.trials);
  const RandomStream root = RandomStream(opt.seed).Substream("verify");

  // Range covers: exact union, node bound, never below the true minimum.
  for (const auto& [c, h, limit] :
       std::vector<std::tuple<int, int, std::int64_t>>{{2, 6, 64}, {10, 2, 100}}) {
    std::int64_t violations = 0, ranges = 0;
    for (std::int64_t l = 0; l < limit; ++l) {
      for (std::int64_t r = l + 1; r <= limit; ++r) {
        std::int64_t pow_h = 1;
        for (int i = 0; i < h; ++i) pow_h *= c;
        if (r - l > pow_h) continue;
        ++ranges;
        const RangeCover cover = internal::CoverForVerify(l, r, c, h, opt.fault);
        const std::int64_t n = static_cast<std::int64_t>(cover.size());
        const std::int64_t bound =
            r - l == 1 ? 1 : 2 * (c - 1) * internal::CeilLog(r - l, c);
        if (!internal::CoverIsExact(cover, l, r, c) || n > bound ||
            n < oracles::MinCoverOracle(l, r, c, h)) {
          ++violations;
        }
      }
    }
    std::ostringstream name;
    name << "c=" << c << " h=" << h << " 0<=l<r<=" << limit << " (" << ranges
         << " ranges)";
    reports.push_back(MakeReport("cover_range", name.str(), 0.0,
                                 static_cast<double>(violations)));
  }
  reports.push_back(MakeReport(
      "cover_range", "(0,99] c=10 h=2 node count", 18.0,
      static_cast<double>(internal::CoverForVerify(0, 99, 10, 2, opt.fault).size())));

  // MostSpan: O(n) vs reference scan; exact range count vs brute force.
  {
    RandomStream s = root.Substream("most-span");
    std::int64_t mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<Timestamp> t;
      Timestamp cur = static_cast<Timestamp>(s.UniformIndex(5));
      const auto n = 1 + s.UniformIndex(12);
      for (std::uint64_t i = 0; i < n; ++i) {
        t.push_back(cur);
        cur += 1 + static_cast<Timestamp>(s.UniformIndex(6));
      }
      const Duration b = static_cast<Duration>(s.UniformIndex(30));
      if (MostSpan(t, b) != MostSpanReference(t, b)) ++mismatches;
      if (MaxAffectedRanges(t, b) != oracles::MaxRangesTouchedOracle(t, b)) ++mismatches;
    }
    reports.push_back(MakeReport("most_span", "500 random schedules", 0.0,
                                 static_cast<double>(mismatches)));
  }

  // Cumulative DCR exact values vs snapshot differences.
  {
    std::int64_t mismatches = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      GeneratorConfig cfg;
      cfg.entries = 20;
      cfg.horizon = 40;
      cfg.constraint = MutationConstraint::MakeAtMostK(4);
      cfg.value_min = -5.0;
      cfg.value_max = 5.0;
      cfg.seed = opt.seed * 7919 + trial;
      const Changelog log = GenerateChangelog(cfg);
      const LinearQuerySpec spec(IdentityFn{}, -5.0, 5.0);
      const auto schedule = ReleaseSchedule::Uniform(5, 5, 8);
      const auto result = RunDcr(log, schedule, spec, LaplaceNoise(1.0, 10.0, trial));
      double cumulative = 0.0;
      for (std::size_t i = 0; i < schedule.size(); ++i) {
        cumulative += result.records[i].exact;
        const double expected =
            oracles::SnapshotOracle(log, schedule.endpoints()[i], spec);
        if (std::fabs(cumulative - expected) > 1e-9) ++mismatches;
      }
    }
    reports.push_back(MakeReport("snapshot_consistency", "100 random changelogs",
                                 0.0, static_cast<double>(mismatches)));
  }

  // Affected-query count: engine vs exhaustive membership, bounded by folds.
  {
    RandomStream s = root.Substream("affected");
    std::int64_t mismatches = 0, excess = 0;
    GeneratorConfig base_cfg;
    base_cfg.entries = 10;
    base_cfg.horizon = 60;
    base_cfg.seed = opt.seed;
    const Changelog base = GenerateChangelog(base_cfg);
    for (int trial = 0; trial < 1000; ++trial) {
      const std::int64_t k = 1 + static_cast<std::int64_t>(s.UniformIndex(4));
      const Duration b = static_cast<Duration>(s.UniformIndex(20));
      const bool bounded = s.Uniform() < 0.5;
      GeneratorConfig one;
      one.entries = 1;
      one.horizon = 60;
      one.mutation_rate = 0.7;
      one.constraint = bounded ? MutationConstraint::MakeTimeBounded(b)
                               : MutationConstraint::MakeAtMostK(k);
      one.seed = s.NextU64();
      auto muts = GenerateChangelog(one).mutations_of("e000000");
      for (auto& m : muts) m.entry = "probe";
      const auto schedule = ReleaseSchedule::Uniform(
          static_cast<Timestamp>(s.UniformIndex(10)),
          1 + static_cast<Duration>(s.UniformIndex(8)), 12);
      const auto filters = schedule.filters();
      const auto engine = AffectedQueryCount(base, muts, filters);
      const auto oracle = oracles::AffectedCountOracle(filters, muts);
      if (engine != oracle) ++mismatches;
      if (oracle > DcrFolds(schedule, one.constraint)) ++excess;
    }
    reports.push_back(MakeReport("affected_query_count", "1000 random DCR instances",
                                 0.0, static_cast<double>(mismatches)));
    reports.push_back(MakeReport("dcr_bound_dominance", "1000 random DCR instances",
                                 0.0, static_cast<double>(excess)));
  }

  // Laplace variance.
  {
    const NoiseSpec noise = LaplaceNoise(0.5, 1.0, 0);
    const auto est = oracles::MonteCarloVariance(
        [&](RandomStream& s) { return Perturb(0.0, noise, s); }, opt.trials,
        opt.seed);
    reports.push_back(MakeReport("laplace_variance", "eps=0.5 s=1",
                                 noise.variance(), est.value, rel_tol * noise.variance()));
  }

  // Optimal rule: elementwise check agrees with the subset oracle.
  for (Eigen::Index n : {2, 3, 5}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      const auto p = OptimalRule(n, eps);
      std::vector<std::vector<double>> cols(static_cast<std::size_t>(n));
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) cols[j].push_back(p(i, j));
      }
      std::ostringstream name;
      name << "n=" << n << " eps=" << eps;
      reports.push_back(MakeCheck(
          "verify_dp", name.str(),
          VerifyDp(p, eps) == oracles::VerifyDpBySubsets(cols, eps) &&
              VerifyDp(p, eps) && !VerifyDp(p, 0.99 * eps)));
    }
  }

  // Aggregate variance law.
  {
    HdcrParams p{4, 2, 0, 16, 1};
    const Changelog empty;
    const auto spec = LinearQuerySpec::Counting();
    const std::int64_t nodes = static_cast<std::int64_t>(CoverRange(3, 14, 2, 4).size());
    const auto est = oracles::MonteCarloVariance(
        [&](RandomStream& s) {
          const auto tree = BuildHdcr(empty, p, spec, LaplaceNoise(1.0, 1.0, s.NextU64()));
          return AggregateRange(tree, 3, 14).noisy;
        },
        opt.trials, opt.seed);
    const double expected = static_cast<double>(nodes) * 2.0;
    reports.push_back(MakeReport("aggregate_variance", "(3,14] c=2 h=4", expected,
                                 est.value, rel_tol * expected));
  }

  // dv_hat unbiasedness on a small scripted population.
  {
    const ResponseSpace answers({"a", "b"});
    const AnswerMutationSpace space(answers);
    const auto p_m = OptimalRule(static_cast<Eigen::Index>(space.size()), 1.0);
    const DeltaVEstimator estimator(p_m, DeltaVMatrix(space));
    const ResponseSampler sampler(p_m);
    std::vector<std::size_t> truth;
    for (int i = 0; i < 30; ++i) truth.push_back(space.Encode("a", "b"));
    for (int i = 0; i < 10; ++i) truth.push_back(space.Encode(std::nullopt, "a"));
    for (int i = 0; i < 20; ++i) truth.push_back(AnswerMutationSpace::kNoChange);
    const auto est = oracles::MonteCarloVector(
        [&](RandomStream& s) {
          Eigen::VectorXd counts = Eigen::VectorXd::Zero(p_m.size());
          for (auto m : truth) counts(static_cast<Eigen::Index>(sampler.Sample(m, s))) += 1.0;
          const Eigen::VectorXd v = estimator.Values(counts);
          return std::vector<double>(v.data(), v.data() + v.size());
        },
        opt.trials, opt.seed);
    const double expected[2] = {-20.0, 30.0};
    for (int i = 0; i < 2; ++i) {
      reports.push_back(MakeReport("delta_v_unbiased",
                                   std::string("component ") + answers.label(i),
                                   expected[i], est.mean[i], 3.0 * est.std_error[i]));
    }
  }
  return reports;
}

}  // namespace cldp
