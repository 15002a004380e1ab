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

#include "cldp/accountant.hpp"

#include <cmath>
#include <vector>

#include "cldp/generator.hpp"
#include "cldp/oracles.hpp"
#include "gtest/gtest.h"

namespace cldp {
namespace {

const auto kK = MutationConstraint::MakeAtMostK;
const auto kB = MutationConstraint::MakeTimeBounded;

TEST(PrivacyLossTest, RejectsOutOfRange) {
  EXPECT_THROW(PrivacyLoss::Make(-0.1, 0), InvalidArgumentError);
  EXPECT_THROW(PrivacyLoss::Make(0.1, 1.5), InvalidArgumentError);
  EXPECT_THROW(PrivacyLoss::Make(NAN, 0), InvalidArgumentError);
  EXPECT_NO_THROW(PrivacyLoss::Make(0, 0));
}

TEST(PrivacyLossTest, PartialOrderAndSup) {
  const PrivacyLoss a{0.1, 1e-6}, b{0.2, 0.0};
  EXPECT_FALSE(Precedes(a, b));
  EXPECT_FALSE(Precedes(b, a));
  EXPECT_EQ(Sup(a, b), (PrivacyLoss{0.2, 1e-6}));
  EXPECT_TRUE(Precedes(a, Sup(a, b)));
}

TEST(ComposeTest, NaiveSums) {
  const PrivacyLoss l{0.1, 1e-6};
  const std::vector<PrivacyLoss> three(3, l);
  const auto got = Compose(three);
  EXPECT_DOUBLE_EQ(got.epsilon, 0.3);
  EXPECT_DOUBLE_EQ(got.delta, 3e-6);
}

TEST(ComposeTest, NaiveNestedFlattens) {
  // Dyadic values keep every partial sum exact.
  const PrivacyLoss l{0.125, 0.0078125};
  const PrivacyLoss two = Compose(std::vector<PrivacyLoss>(2, l));
  const PrivacyLoss three = Compose(std::vector<PrivacyLoss>(3, l));
  EXPECT_EQ(Compose(std::vector<PrivacyLoss>{two, three}),
            Compose(std::vector<PrivacyLoss>(5, l)));
  EXPECT_EQ(Compose(std::vector<PrivacyLoss>(5, l)), KFold(l, 5));
}

TEST(ComposeTest, AdvancedMatchesHighPrecisionValue) {
  // 0.1 sqrt(20 ln 1e6) + (e^0.1 - 1), evaluated to 40 digits offline.
  const double expected = 1.767429054344757549850802233986860069665;
  const auto got = Compose(std::vector<PrivacyLoss>(10, {0.1, 0.0}),
                           AdvancedComposition{1e-6});
  EXPECT_NEAR(got.epsilon, expected, 4 * (std::nextafter(expected, 2.0) - expected));
  EXPECT_DOUBLE_EQ(got.delta, 1e-6);

  // Independent long-double evaluation.
  const long double e = 0.1L;
  const long double ref = e * std::sqrt(20.0L * std::log(1e6L)) + 10.0L * e * std::expm1(e);
  EXPECT_NEAR(got.epsilon, static_cast<double>(ref), 1e-14);
}

TEST(ComposeTest, AdvancedRejectsHeterogeneous) {
  EXPECT_THROW(Compose(std::vector<PrivacyLoss>{{0.1, 0}, {0.2, 0}},
                       AdvancedComposition{}),
               HeterogeneousAdvancedError);
  EXPECT_THROW(Compose({}), InvalidArgumentError);
}

TEST(KFoldTest, ZeroFoldsIsFree) {
  EXPECT_EQ(KFold({0.5, 0.1}, 0), (PrivacyLoss{0, 0}));
  EXPECT_EQ(KFold({0.5, 0.1}, 0, AdvancedComposition{}), (PrivacyLoss{0, 0}));
  EXPECT_THROW(KFold({0.5, 0.1}, -1), InvalidArgumentError);
}

TEST(MostSpanTest, Examples) {
  const std::vector<Timestamp> t{0, 1, 2, 3};
  EXPECT_EQ(MostSpanReference(t, 1), 2);
  EXPECT_EQ(MostSpan(t, 1), 2);
  const std::vector<Timestamp> single{5};
  EXPECT_EQ(MostSpan(single, 3), 0);
  EXPECT_EQ(MostSpanReference(single, 3), 0);
}

TEST(MostSpanTest, UniformScheduleIsCeilPlusOne) {
  for (auto [w, b] : std::vector<std::pair<Duration, Duration>>{{1, 1}, {3, 7}, {5, 5}}) {
    const auto s = ReleaseSchedule::Uniform(w, w, 40);
    const std::int64_t expected = CeilDiv(b, w) + 1;
    EXPECT_EQ(MostSpanReference(s.endpoints(), b), expected);
    EXPECT_EQ(MostSpan(s, b), expected);
    EXPECT_EQ(MaxAffectedRanges(s, b), expected);
  }
}

TEST(MostSpanTest, FastMatchesReferenceAndExactMatchesBruteForce) {
  RandomStream rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Timestamp> t;
    Timestamp cur = static_cast<Timestamp>(rng.UniformIndex(10));
    const auto n = 1 + rng.UniformIndex(15);
    for (std::uint64_t i = 0; i < n; ++i) {
      t.push_back(cur);
      cur += 1 + static_cast<Timestamp>(rng.UniformIndex(7));
    }
    const Duration b = static_cast<Duration>(rng.UniformIndex(40));
    ASSERT_EQ(MostSpan(t, b), MostSpanReference(t, b));
    ASSERT_EQ(MaxAffectedRanges(t, b), oracles::MaxRangesTouchedOracle(t, b));
  }
}

TEST(MaxAffectedRangesTest, ZeroBoundTouchesOneRange) {
  const auto s = ReleaseSchedule::Uniform(1, 1, 10);
  EXPECT_EQ(MaxAffectedRanges(s, 0), 1);
  EXPECT_EQ(MostSpanReference(s.endpoints(), 0), 2);
}

TEST(DcrBoundTest, Examples) {
  const auto s = ReleaseSchedule::Uniform(7, 7, 20);
  const PrivacyLoss q{0.1, 0.0};
  auto got = DcrBound(s, q, kK(3));
  EXPECT_DOUBLE_EQ(got.epsilon, 0.3);
  EXPECT_EQ(got.delta, 0.0);
  EXPECT_DOUBLE_EQ(DcrBound(s, q, kB(14)).epsilon, 0.30000000000000004);
  EXPECT_EQ(DcrFolds(s, kB(14)), 3);
  const auto hybrid = MutationConstraint::MakeHybrid({kK(1), kB(0)});
  EXPECT_EQ(DcrFolds(s, hybrid), 1);
  EXPECT_EQ(DcrBound(s, q, hybrid), q);
}

TEST(DcrBoundTest, HybridIsComponentwiseSup) {
  const auto s = ReleaseSchedule::Uniform(1, 1, 30);
  const auto hybrid = MutationConstraint::MakeHybrid({kK(2), kB(5)});
  const PrivacyLoss q{0.1, 1e-7};
  EXPECT_EQ(DcrBound(s, q, hybrid), Sup(DcrBound(s, q, kK(2)), DcrBound(s, q, kB(5))));
  // Advanced composition: the sup is still per branch.
  const AdvancedComposition adv{1e-6};
  EXPECT_EQ(DcrBound(s, q, hybrid, adv),
            Sup(DcrBound(s, q, kK(2), adv), DcrBound(s, q, kB(5), adv)));
}

TEST(SwcrBoundTest, Examples) {
  SwcrParams p{7, 14, 14, 30};
  EXPECT_EQ(SwcrFolds(p, kK(2)), 4);
  EXPECT_DOUBLE_EQ(SwcrBound(p, {0.05, 0}, kK(2)).epsilon, 0.2);
  EXPECT_EQ(SwcrFolds(p, kB(7)), 3);
  SwcrParams tumbling{5, 5, 5, 10};
  EXPECT_EQ(SwcrFolds(tumbling, kK(1)), 1);
}

TEST(HdcrBoundTest, Examples) {
  HdcrParams p{3, 2, 0, 64, 1};
  EXPECT_EQ(HdcrFolds(p, kK(2)), 6);
  EXPECT_DOUBLE_EQ(HdcrBound(p, {0.1, 0}, kK(2)).epsilon, 0.6000000000000001);

  HdcrParams two{2, 2, 0, 64, 1};
  EXPECT_EQ(HdcrFolds(two, kB(2)), 5);
  EXPECT_DOUBLE_EQ(HdcrBound(two, {0.1, 0}, kB(2)).epsilon, 0.5);
  EXPECT_DOUBLE_EQ(HdcrClosedFormTimeBoundedFolds(two, 2), 2.0 + 1.0 + 1.0 + 1.0);
}

TEST(HdcrBoundTest, HeightOneIsDcr) {
  HdcrParams p{1, 2, 0, 50, 5};
  const auto s = p.layer_schedule(0);
  for (Duration b : {0, 3, 5, 12, 49}) {
    EXPECT_EQ(HdcrFolds(p, kB(b)), DcrFolds(s, kB(b))) << b;
  }
  EXPECT_EQ(HdcrFolds(p, kK(4)), DcrFolds(s, kK(4)));
}

TEST(LocalBoundTest, Examples) {
  const auto s = ReleaseSchedule::Uniform(1, 1, 10);
  const auto got = LocalBound(DcrFolds(s, kK(2)), {0.1, 0});
  EXPECT_DOUBLE_EQ(got.epsilon, 0.4);
  SwcrParams tumbling{3, 3, 3, 10};
  EXPECT_EQ(LocalFolds(SwcrFolds(tumbling, kK(1))), 2);
  EXPECT_EQ(LocalBound(0, {0.1, 0.1}), (PrivacyLoss{0, 0}));
}

TEST(AffectedQueryCountTest, Examples) {
  const Changelog base({Mutation::Insert("a", 1, 1)});
  const auto filters = ReleaseSchedule::Uniform(2, 2, 5).filters();
  EXPECT_EQ(AffectedQueryCount(base, {Mutation::Insert("x", 3, 1)}, filters), 1);
  // One mutation in each of k = 3 distinct intervals.
  EXPECT_EQ(AffectedQueryCount(base,
                               {Mutation::Insert("x", 1, 1), Mutation::Modify("x", 3, 1, 2),
                                Mutation::Modify("x", 5, 2, 3)},
                               filters),
            3);
  EXPECT_EQ(AffectedQueryCount(base, {}, filters), 0);
}

TEST(AffectedQueryCountTest, PackedDcrAndSwcr) {
  const Changelog base;
  // Uniform W=1, B=2: an entry touching t = 1, 2, 3 hits ceil(2/1) + 1 ranges.
  const auto dcr = ReleaseSchedule::Uniform(1, 1, 10).filters();
  EXPECT_EQ(AffectedQueryCount(base,
                               {Mutation::Insert("x", 1, 1), Mutation::Modify("x", 2, 1, 2),
                                Mutation::Modify("x", 3, 2, 3)},
                               dcr),
            3);
  // SWCR W=14, P=7: one mutation is seen by at most ceil(W/P) windows.
  SwcrParams p{7, 14, 14, 10};
  for (Timestamp t = 0; t < 80; ++t) {
    EXPECT_LE(AffectedQueryCount(base, {Mutation::Insert("x", t, 1)}, p.filters()), 2);
  }
}

TEST(AccountantPropertyTest, FoldsMonotoneInConstraint) {
  const auto s = ReleaseSchedule::Uniform(0, 3, 30);
  SwcrParams w{2, 7, 7, 20};
  HdcrParams h{4, 2, 0, 90, 3};
  for (std::int64_t k = 1; k < 8; ++k) {
    EXPECT_LE(DcrFolds(s, kK(k)), DcrFolds(s, kK(k + 1)));
    EXPECT_LE(SwcrFolds(w, kK(k)), SwcrFolds(w, kK(k + 1)));
    EXPECT_LE(HdcrFolds(h, kK(k)), HdcrFolds(h, kK(k + 1)));
  }
  for (Duration b = 0; b < 40; ++b) {
    EXPECT_LE(DcrFolds(s, kB(b)), DcrFolds(s, kB(b + 1)));
    EXPECT_LE(SwcrFolds(w, kB(b)), SwcrFolds(w, kB(b + 1)));
    EXPECT_LE(HdcrFolds(h, kB(b)), HdcrFolds(h, kB(b + 1)));
  }
}

TEST(AccountantPropertyTest, HybridNeverExceedsBranches) {
  const auto s = ReleaseSchedule::Uniform(0, 2, 25);
  for (std::int64_t k = 1; k < 5; ++k) {
    for (Duration b = 0; b < 12; ++b) {
      const auto hybrid = MutationConstraint::MakeHybrid({kK(k), kB(b)});
      EXPECT_EQ(DcrFolds(s, hybrid), std::max(DcrFolds(s, kK(k)), DcrFolds(s, kB(b))));
    }
  }
}

}  // namespace
}  // namespace cldp
