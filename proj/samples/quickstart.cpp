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

// Generates a small dynamic database, releases a private count of entries
// every 10 ticks, and prints the accounted loss next to each answer.

#include <cstdio>

#include "cldp/cldp.hpp"

int main() {
  cldp::GeneratorConfig cfg;
  cfg.entries = 200;
  cfg.horizon = 100;
  cfg.constraint = cldp::MutationConstraint::MakeAtMostK(3);
  cfg.seed = 7;
  const cldp::Changelog log = cldp::GenerateChangelog(cfg);

  const auto schedule = cldp::ReleaseSchedule::Uniform(10, 10, 10);
  const auto spec = cldp::LinearQuerySpec::Counting();
  const cldp::PrivacyLoss per_query{0.1, 0.0};
  const auto total = cldp::DcrBound(schedule, per_query, cfg.constraint);
  const auto result =
      cldp::RunDcr(log, schedule, spec, cldp::LaplaceNoise(per_query.epsilon, 1.0, 42));

  std::printf("%zu mutations, constraint %s, total loss (%.3g, %.3g)\n", log.size(),
              cldp::ToString(cfg.constraint).c_str(), total.epsilon, total.delta);
  double running = 0.0;
  for (const auto& r : result.records) {
    running += r.noisy;
    std::printf("t<=%3lld  change %+8.2f  count %8.2f\n",
                static_cast<long long>(r.filter.end()), r.noisy, running);
  }

  // The same windows answered from a hierarchy instead of one query each.
  const cldp::SwcrParams swcr{1, 32, 32, 8};
  const auto cmp = cldp::CompareHdcrSwcr(swcr, 2, cfg.constraint);
  std::printf("W=32 P=1: 2(c-1)h^3 = %g vs ceil(W/P)^2 = %g -> %s\n", cmp.lhs, cmp.rhs,
              cmp.hdcr_wins ? "hierarchy wins" : "direct windows win");
  return 0;
}
