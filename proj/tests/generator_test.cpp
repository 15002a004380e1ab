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

#include "cldp/generator.hpp"

#include <sstream>

#include "cldp/changelog_io.hpp"
#include "gtest/gtest.h"

namespace cldp {
namespace {

TEST(GeneratorTest, SatisfiesDeclaredConstraint) {
  for (const auto& c : {MutationConstraint::MakeAtMostK(3), MutationConstraint::MakeTimeBounded(6),
                        ParseConstraint("atmost:2,bounded:4")}) {
    GeneratorConfig cfg;
    cfg.entries = 100;
    cfg.horizon = 50;
    cfg.constraint = c;
    cfg.mutation_rate = 0.9;
    cfg.seed = 3;
    const Changelog log = GenerateChangelog(cfg);
    EXPECT_EQ(log.entries().size(), 100u);
    EXPECT_TRUE(SatisfiesConstraint(log, c)) << ToString(c);
  }
}

TEST(GeneratorTest, ZeroRateGivesInsertionsOnly) {
  GeneratorConfig cfg;
  cfg.entries = 40;
  cfg.constraint = MutationConstraint::MakeAtMostK(5);
  cfg.mutation_rate = 0.0;
  const Changelog log = GenerateChangelog(cfg);
  EXPECT_EQ(log.size(), 40u);
  for (const auto& m : log) EXPECT_TRUE(m.is_insertion());
}

TEST(GeneratorTest, SameSeedSameBytes) {
  GeneratorConfig cfg;
  cfg.seed = 99;
  std::ostringstream a, b;
  WriteChangelogJsonl(GenerateChangelog(cfg), a);
  WriteChangelogJsonl(GenerateChangelog(cfg), b);
  EXPECT_EQ(a.str(), b.str());
  cfg.seed = 100;
  std::ostringstream c;
  WriteChangelogJsonl(GenerateChangelog(cfg), c);
  EXPECT_NE(a.str(), c.str());
}

TEST(GeneratorTest, ConfigErrorsNameTheField) {
  GeneratorConfig cfg;
  cfg.entries = 0;
  try {
    GenerateChangelog(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "generator.n_entries");
  }
  cfg.entries = 1;
  cfg.mutation_rate = 2;
  EXPECT_THROW(GenerateChangelog(cfg), ConfigError);
}

TEST(GeneratorTest, AnswersRespectConstraint) {
  const ResponseSpace answers({"a", "b", "c"});
  GeneratorConfig cfg;
  cfg.entries = 50;
  cfg.horizon = 30;
  cfg.constraint = MutationConstraint::MakeAtMostK(2);
  cfg.mutation_rate = 1.0;
  const AnswerLog log(answers, GenerateAnswers(cfg, answers));
  EXPECT_EQ(log.entry_count(), 50u);
  EXPECT_TRUE(SatisfiesConstraint(log.ToChangelog(), cfg.constraint));
}

}  // namespace
}  // namespace cldp
