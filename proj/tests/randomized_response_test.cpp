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

#include "cldp/randomized_response.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "cldp/oracles.hpp"
#include "gtest/gtest.h"

namespace cldp {
namespace {

std::vector<std::vector<double>> Columns(const ProbabilityMatrix& p) {
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(p.size()));
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    for (Eigen::Index i = 0; i < p.size(); ++i) cols[j].push_back(p(i, j));
  }
  return cols;
}

TEST(OptimalRuleTest, Examples) {
  const auto p = OptimalRule(2, std::log(3.0));
  EXPECT_NEAR(p(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(p(1, 0), 0.25, 1e-15);
  const auto sharp = OptimalRule(5, 50);
  EXPECT_TRUE(sharp.matrix().isApprox(Eigen::MatrixXd::Identity(5, 5), 1e-15));
  EXPECT_LE((sharp.matrix() - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(OptimalRule(3, 0), InvalidEpsilonError);
  EXPECT_THROW(OptimalRule(3, -1), InvalidEpsilonError);
  EXPECT_THROW(OptimalRule(1, 1), InvalidArgumentError);
}

TEST(OptimalRuleTest, ColumnsSumToOne) {
  for (Eigen::Index n : {2, 9, 16, 26}) {
    for (double eps : {0.1, 1.0, 5.0}) {
      const auto p = OptimalRule(n, eps);
      for (Eigen::Index j = 0; j < n; ++j) EXPECT_NEAR(p.matrix().col(j).sum(), 1.0, 1e-12);
    }
  }
}

TEST(VerifyDpTest, OptimalRuleIsTight) {
  for (Eigen::Index n : {2, 3, 9, 26}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      const auto p = OptimalRule(n, eps);
      EXPECT_TRUE(VerifyDp(p, eps));
      EXPECT_FALSE(VerifyDp(p, 0.99 * eps));
      if (n <= 9) {
        EXPECT_TRUE(oracles::VerifyDpBySubsets(Columns(p), eps));
        EXPECT_FALSE(oracles::VerifyDpBySubsets(Columns(p), 0.99 * eps));
      }
    }
  }
}

TEST(VerifyDpTest, IdentityAndUniform) {
  const ProbabilityMatrix id(Eigen::MatrixXd::Identity(3, 3));
  EXPECT_FALSE(VerifyDp(id, 10.0));
  const ProbabilityMatrix uniform(Eigen::MatrixXd::Constant(4, 4, 0.25));
  EXPECT_TRUE(VerifyDp(uniform, 0.0));
  EXPECT_THROW(ProbabilityMatrix(Eigen::MatrixXd::Constant(2, 2, 0.4)), InvalidArgumentError);
}

TEST(MutationSpaceTest, EncodeAndDeltaV) {
  const AnswerMutationSpace space(ResponseSpace({"r1", "r2"}));
  EXPECT_EQ(space.size(), 9u);
  EXPECT_EQ(space.Encode(std::nullopt, std::nullopt), AnswerMutationSpace::kNoChange);
  const Eigen::MatrixXd m = DeltaVMatrix(space);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 9);
  EXPECT_EQ(m.col(space.Encode("r1", "r2")), Eigen::Vector2d(-1, 1));
  EXPECT_EQ(m.col(space.Encode(std::nullopt, "r1")), Eigen::Vector2d(1, 0));
  EXPECT_EQ(m.col(space.Encode("r2", std::nullopt)), Eigen::Vector2d(0, -1));
  EXPECT_THROW(space.Encode("r3", std::nullopt), UnknownLabelError);
  EXPECT_EQ(space.OneHot(4).sum(), 1.0);
  EXPECT_EQ(space.OneHot(4)(4), 1.0);
}

TEST(MutationSpaceTest, DeltaVStructure) {
  const AnswerMutationSpace space(ResponseSpace({"a", "b", "c"}));
  const Eigen::MatrixXd m = DeltaVMatrix(space);
  for (std::size_t j = 0; j < space.size(); ++j) {
    const auto [prev, next] = space.Slots(j);
    const auto nonzero = (m.col(static_cast<Eigen::Index>(j)).array() != 0).count();
    if (prev == next) {
      EXPECT_EQ(nonzero, 0);
    } else if (prev == 0 || next == 0) {
      EXPECT_EQ(nonzero, 1);
    } else {
      EXPECT_EQ(nonzero, 2);
    }
    EXPECT_LE(std::fabs(m.col(static_cast<Eigen::Index>(j)).sum()), 1.0);
  }
}

TEST(InversionTest, ClosedFormMatchesLu) {
  for (Eigen::Index n : {2, 9, 16}) {
    for (double eps : {0.2, 1.0, 3.0}) {
      const auto lu = InvertProbabilityMatrix(OptimalRule(n, eps));
      const auto closed = OptimalRuleInverse(n, eps);
      EXPECT_LE((lu - closed).cwiseAbs().maxCoeff(), 1e-10) << n << " " << eps;
    }
  }
}

TEST(InversionTest, SingularRejected) {
  const ProbabilityMatrix uniform(Eigen::MatrixXd::Constant(3, 3, 1.0 / 3.0));
  EXPECT_THROW(InvertProbabilityMatrix(uniform), SingularMatrixError);
  // Nearly uniform: condition number far above 1e12.
  EXPECT_THROW(InvertProbabilityMatrix(OptimalRule(9, 1e-14)), SingularMatrixError);
}

TEST(EstimateDeltaVTest, IdentityRuleIsExact) {
  const AnswerMutationSpace space(ResponseSpace({"a", "b"}));
  const ProbabilityMatrix id(Eigen::MatrixXd::Identity(9, 9));
  const std::vector<std::size_t> responses{space.Encode("a", "b"), space.Encode("a", "b"),
                                           space.Encode(std::nullopt, "a"),
                                           AnswerMutationSpace::kNoChange};
  const auto est = EstimateDeltaV(responses, id, DeltaVMatrix(space));
  EXPECT_NEAR(est.values(0), -1.0, 1e-12);
  EXPECT_NEAR(est.values(1), 2.0, 1e-12);
  EXPECT_TRUE(est.covariance.isApprox(est.covariance.transpose()));
}

TEST(EstimateDeltaVTest, SingleChangeUnbiased) {
  const AnswerMutationSpace space(ResponseSpace({"r1", "r2"}));
  const auto p_m = OptimalRule(9, 1.0);
  const DeltaVEstimator estimator(p_m, DeltaVMatrix(space));
  const ResponseSampler sampler(p_m);
  const std::size_t truth = space.Encode("r1", "r2");
  const auto est = oracles::MonteCarloVector(
      [&](RandomStream& s) {
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(9);
        counts(static_cast<Eigen::Index>(sampler.Sample(truth, s))) = 1;
        const Eigen::VectorXd v = estimator.Values(counts);
        return std::vector<double>{v(0), v(1)};
      },
      100000, 21);
  EXPECT_NEAR(est.mean[0], -1.0, 3 * est.std_error[0]);
  EXPECT_NEAR(est.mean[1], 1.0, 3 * est.std_error[1]);
}

TEST(EstimateDeltaVTest, NoChangeCentersOnZero) {
  const AnswerMutationSpace space(ResponseSpace({"a", "b", "c"}));
  const auto p_m = OptimalRule(16, 2.0);
  const DeltaVEstimator estimator(p_m, DeltaVMatrix(space));
  const ResponseSampler sampler(p_m);
  const auto est = oracles::MonteCarloVector(
      [&](RandomStream& s) {
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(16);
        for (int i = 0; i < 20; ++i) {
          counts(static_cast<Eigen::Index>(sampler.Sample(AnswerMutationSpace::kNoChange, s))) += 1;
        }
        const Eigen::VectorXd v = estimator.Values(counts);
        return std::vector<double>(v.data(), v.data() + v.size());
      },
      20000, 22);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(est.mean[i], 0.0, 3 * est.std_error[i]);
}

TEST(ResponseSamplerTest, OneHotMeanMatchesColumn) {
  const auto p = OptimalRule(4, 1.0);
  const ResponseSampler sampler(p);
  const int n = 100000;
  for (std::size_t truth : {0u, 3u}) {
    std::vector<double> freq(4, 0.0);
    RandomStream s(static_cast<std::uint64_t>(truth) + 5);
    for (int i = 0; i < n; ++i) freq[sampler.Sample(truth, s)] += 1.0 / n;
    for (Eigen::Index i = 0; i < 4; ++i) {
      const double pi = p(i, static_cast<Eigen::Index>(truth));
      EXPECT_NEAR(freq[i], pi, 3 * std::sqrt(pi * (1 - pi) / n));
    }
  }
}

TEST(CovarianceTest, PluginMatchesMonteCarlo) {
  // 200 entries, all reporting r1 -> r2.
  const AnswerMutationSpace space(ResponseSpace({"r1", "r2"}));
  const auto p_m = OptimalRule(9, 1.5);
  const DeltaVEstimator estimator(p_m, DeltaVMatrix(space));
  const ResponseSampler sampler(p_m);
  const std::size_t truth = space.Encode("r1", "r2");
  const int population = 200;
  Eigen::MatrixXd plugin = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd verbatim = Eigen::MatrixXd::Zero(2, 2);
  const int trials = 5000;
  const auto est = oracles::MonteCarloVector(
      [&](RandomStream& s) {
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(9);
        for (int i = 0; i < population; ++i) {
          counts(static_cast<Eigen::Index>(sampler.Sample(truth, s))) += 1;
        }
        const auto e = estimator.Estimate(counts);
        plugin += e.multinomial_covariance / trials;
        verbatim += e.covariance / trials;
        return std::vector<double>{e.values(0), e.values(1)};
      },
      trials, 23);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(plugin(i, i), est.covariance[i][i], 0.1 * est.covariance[i][i]);
    // The verbatim form is the plug-in divided by N^2.
    EXPECT_NEAR(verbatim(i, i) * population * population, plugin(i, i), 1e-9 * plugin(i, i));
  }
}

AnswerLog ScriptedLog(const ResponseSpace& answers) {
  std::vector<AnswerRecord> recs;
  recs.push_back({"a", 1, "x"});
  recs.push_back({"a", 5, "y"});
  recs.push_back({"b", 2, "y"});
  recs.push_back({"b", 7, std::nullopt});
  recs.push_back({"c", 3, "x"});
  return AnswerLog(answers, recs);
}

TEST(AnswerLogTest, SlotsAndHistogram) {
  const ResponseSpace answers({"x", "y"});
  const auto log = ScriptedLog(answers);
  const AnswerMutationSpace space(answers);
  EXPECT_EQ(log.SlotAt("a", 0), 0u);
  EXPECT_EQ(log.SlotAt("a", 4), 1u);
  EXPECT_EQ(log.SlotAt("a", 5), 2u);
  EXPECT_EQ(log.NetMutation("a", std::nullopt, 6, space), space.Encode(std::nullopt, "y"));
  EXPECT_EQ(log.NetMutation("b", 1, 8, space), AnswerMutationSpace::kNoChange);
  EXPECT_EQ(log.HistogramAt(4, 2), Eigen::Vector2d(2, 1));
  EXPECT_EQ(log.HistogramAt(8, 2), Eigen::Vector2d(1, 1));
  EXPECT_EQ(log.ToChangelog().size(), 5u);
  EXPECT_THROW(AnswerLog(answers, {{"a", 1, "z"}}), UnknownLabelError);
  EXPECT_THROW(AnswerLog(answers, {{"a", 1, "x"}, {"a", 1, "y"}}), InvalidArgumentError);
}

TEST(AnswerLogTest, ReadsJsonl) {
  std::istringstream in(
      "{\"entry\":\"a\",\"t\":1,\"answer\":\"x\"}\n"
      "{\"entry\":\"a\",\"t\":3,\"answer\":null}\n");
  const auto recs = ReadAnswerRecordsJsonl(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(*recs[0].answer, "x");
  EXPECT_FALSE(recs[1].answer.has_value());
  std::istringstream bad("{\"entry\":\"a\",\"t\":\"1\",\"answer\":\"x\"}\n");
  EXPECT_THROW(ReadAnswerRecordsJsonl(bad), InvalidArgumentError);
}

TEST(RrDcrTest, SingleIntervalMatchesEstimator) {
  const ResponseSpace answers({"x", "y"});
  const auto log = ScriptedLog(answers);
  const auto rel = RrDcr(log, answers, ReleaseSchedule({10}), 1.0, 4);
  ASSERT_EQ(rel.intervals.size(), 1u);
  const AnswerMutationSpace space(answers);
  const auto p_m = OptimalRule(9, 1.0);
  const ResponseSampler sampler(p_m);
  const RandomStream root = RandomStream(4).Substream("rr-dcr").Substream(std::uint64_t{0});
  std::vector<std::size_t> responses;
  for (const auto& id : log.entries()) {
    RandomStream s = root.Substream(id);
    responses.push_back(sampler.Sample(log.NetMutation(id, std::nullopt, 10, space), s));
  }
  const auto direct = EstimateDeltaV(responses, p_m, DeltaVMatrix(space));
  EXPECT_TRUE(rel.intervals[0].delta.values.isApprox(direct.values, 1e-12));
  EXPECT_EQ(rel.intervals[0].true_delta, Eigen::Vector2d(1, 1));
}

TEST(RrDcrTest, CumulativeTracksHistogram) {
  const ResponseSpace answers({"x", "y"});
  const auto log = ScriptedLog(answers);
  const auto schedule = ReleaseSchedule::Uniform(2, 2, 4);
  const auto est = oracles::MonteCarloVector(
      [&](RandomStream& s) {
        const auto rel = RrDcr(log, answers, schedule, 2.0, s.NextU64());
        std::vector<double> out;
        for (const auto& iv : rel.intervals) out.push_back(iv.cumulative(0));
        return out;
      },
      4000, 24);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    EXPECT_NEAR(est.mean[i], log.HistogramAt(schedule.endpoints()[i], 2)(0),
                3 * est.std_error[i]);
  }
}

TEST(RrHdcrTest, HeightOneIsDcr) {
  const ResponseSpace answers({"x", "y"});
  const auto log = ScriptedLog(answers);
  const HdcrParams p{1, 2, 0, 1, 8};
  const auto tree = RrHdcr(log, answers, p, 1.0, 3);
  ASSERT_EQ(tree.series.size(), 1u);
  EXPECT_EQ(tree.series[0].node_count, 1);
  EXPECT_EQ(tree.series[0].time, 1);
  EXPECT_THROW(RrHdcr(log, answers, HdcrParams{1, 2, 0, 8, 1}, 1.0, 3), RangeTooWideError);
}

TEST(RrHdcrTest, AlignedPrefixNodeCount) {
  const ResponseSpace answers({"x", "y"});
  const auto log = ScriptedLog(answers);
  const HdcrParams p{3, 3, 0, 27, 1};
  const auto rel = RrHdcr(log, answers, p, 1.0, 3);
  for (const auto& pt : rel.series) {
    EXPECT_LE(pt.node_count, (3 - 1) * 3) << pt.time;
    EXPECT_EQ(pt.node_count, CoverRange(0, pt.time, 3, 3).size());
  }
  EXPECT_EQ(rel.series[8].node_count, 1);   // 9 = 100 in base 3
  EXPECT_EQ(rel.series[25].node_count, 6);  // 26 = 222 in base 3
}

}  // namespace
}  // namespace cldp
