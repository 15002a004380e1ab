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

// Serialization of release results.
//
// CSV: "# key=value" header lines carrying run metadata, then the columns
//   query_index,t_start,t_end,noisy[,exact]
// JSONL: a {"header": {...}} line, then one object per query; HDCR aggregates
//   also carry node_count and variance.
//
// `exact` is written only when include_exact is set.

#pragma once

#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "cldp/release.hpp"
#include "json.hpp"

namespace cldp {

namespace internal {

inline std::string FormatReal(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

inline std::string FormatStart(const TimeRangeFilter& f) {
  return f.start() ? std::to_string(*f.start()) : std::string("-inf");
}

}  // namespace internal

inline void WriteReleaseCsv(const ReleaseResult& result,
                            const nlohmann::json& header, bool include_exact,
                            std::ostream& out) {
  for (const auto& [key, value] : header.items()) {
    out << "# " << key << "=" << value.dump() << '\n';
  }
  out << "query_index,t_start,t_end,noisy";
  if (include_exact) out << ",exact";
  out << '\n';
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    out << i << ',' << internal::FormatStart(r.filter) << ',' << r.filter.end()
        << ',' << internal::FormatReal(r.noisy);
    if (include_exact) out << ',' << internal::FormatReal(r.exact);
    out << '\n';
  }
}

inline void WriteReleaseJsonl(const ReleaseResult& result,
                              const nlohmann::json& header, bool include_exact,
                              std::ostream& out) {
  out << nlohmann::json{{"header", header}}.dump() << '\n';
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    nlohmann::json j;
    j["query_index"] = i;
    j["t_start"] = r.filter.start() ? nlohmann::json(*r.filter.start())
                                    : nlohmann::json(nullptr);
    j["t_end"] = r.filter.end();
    j["noisy"] = r.noisy;
    if (r.node_count) j["node_count"] = *r.node_count;
    if (r.variance) j["variance"] = *r.variance;
    if (include_exact) j["exact"] = r.exact;
    out << j.dump() << '\n';
  }
}

}  // namespace cldp
