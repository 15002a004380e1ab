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

#include "cldp/oracles.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace cldp::oracles {
namespace {

TEST(MonteCarloTest, ConstantHasZeroVariance) {
  const auto est = MonteCarloVariance([](RandomStream&) { return 3.0; }, 1000, 1);
  EXPECT_EQ(est.value, 0.0);
  EXPECT_EQ(MonteCarloMean([](RandomStream&) { return 3.0; }, 1000, 1).value, 3.0);
}

TEST(MonteCarloTest, LaplaceVariance) {
  const double b = 1.5;
  const auto est = MonteCarloVariance([&](RandomStream& s) { return s.Laplace(b); },
                                      100000, 2);
  EXPECT_NEAR(est.value, 2 * b * b, 0.05 * 2 * b * b);
  EXPECT_GT(est.std_error, 0.0);
}

TEST(MonteCarloTest, DeterministicAndOrderFree) {
  auto sampler = [](RandomStream& s) { return s.Uniform(); };
  EXPECT_EQ(MonteCarloMean(sampler, 500, 9).value, MonteCarloMean(sampler, 500, 9).value);
  EXPECT_NE(MonteCarloMean(sampler, 500, 9).value, MonteCarloMean(sampler, 500, 10).value);
  // Trial t always sees the same stream, whatever the trial count.
  const auto v = MonteCarloVector(
      [](RandomStream& s) { return std::vector<double>{s.Uniform()}; }, 1, 9);
  EXPECT_EQ(v.mean[0], RandomStream(9).Substream(std::uint64_t{0}).Uniform());
}

TEST(MonteCarloTest, VectorCovariance) {
  const auto est = MonteCarloVector(
      [](RandomStream& s) {
        const double x = s.Laplace(1.0);
        return std::vector<double>{x, 2 * x};
      },
      50000, 4);
  EXPECT_NEAR(est.covariance[0][1], 2 * est.covariance[0][0], 1e-9);
  EXPECT_NEAR(est.covariance[0][0], 2.0, 0.1);
}

TEST(MinCoverOracleTest, SmallCases) {
  EXPECT_EQ(MinCoverOracle(0, 99, 10, 2), 18);
  EXPECT_EQ(MinCoverOracle(0, 100, 10, 3), 1);
  EXPECT_EQ(MinCoverOracle(1, 7, 2, 3), 4);  // (1,2] (2,4] (4,6] (6,7]
}

TEST(MaxRangesTouchedOracleTest, Examples) {
  const std::vector<Timestamp> t{1, 2, 3, 4, 5};
  EXPECT_EQ(MaxRangesTouchedOracle(t, 0), 1);
  EXPECT_EQ(MaxRangesTouchedOracle(t, 2), 3);
  EXPECT_EQ(MaxRangesTouchedOracle(t, 100), 5);
}

TEST(AffectedCountOracleTest, Examples) {
  const std::vector<TimeRangeFilter> filters{TimeRangeFilter::UpTo(2), {2, 4}, {4, 6}};
  EXPECT_EQ(AffectedCountOracle(filters, {}), 0);
  const std::vector<Mutation> muts{Mutation::Insert("x", 3, 1), Mutation::Modify("x", 4, 1, 2),
                                   Mutation::Modify("x", 5, 2, 3)};
  EXPECT_EQ(AffectedCountOracle(filters, muts), 2);
}

TEST(VerifyDpBySubsetsTest, Examples) {
  EXPECT_TRUE(VerifyDpBySubsets({{0.5, 0.5}, {0.5, 0.5}}, 0.0));
  EXPECT_FALSE(VerifyDpBySubsets({{1, 0}, {0, 1}}, 5.0));
  EXPECT_TRUE(VerifyDpBySubsets({{0.75, 0.25}, {0.25, 0.75}}, std::log(3.0)));
}

TEST(MakeReportTest, Tolerance) {
  EXPECT_TRUE(MakeReport("a", "b", 1.0, 1.0).pass);
  EXPECT_FALSE(MakeReport("a", "b", 1.0, 1.01).pass);
  EXPECT_TRUE(MakeReport("a", "b", 1.0, 1.01, 0.02).pass);
  EXPECT_FALSE(MakeCheck("a", "b", false).pass);
}

}  // namespace
}  // namespace cldp::oracles
