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

// JSON Lines form of a changelog, one mutation per line:
//   {"entry":"<id>","t":<int>,"prev":<number|null>,"new":<number|null>}

#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cldp/changelog.hpp"
#include "json.hpp"

namespace cldp {

inline nlohmann::json ToJson(const Mutation& m) {
  nlohmann::json j;
  j["entry"] = m.entry;
  j["t"] = m.time;
  j["prev"] = m.prev ? nlohmann::json(*m.prev) : nlohmann::json(nullptr);
  j["new"] = m.next ? nlohmann::json(*m.next) : nlohmann::json(nullptr);
  return j;
}

inline Mutation MutationFromJson(const nlohmann::json& j) {
  auto optional_number = [&](const char* key) -> std::optional<double> {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) {
      throw InvalidArgumentError(std::string("field '") + key +
                                 "' must be a number or null");
    }
    return v.get<double>();
  };
  if (!j.at("t").is_number_integer()) {
    throw InvalidArgumentError("field 't' must be an integer");
  }
  return Mutation{j.at("entry").get<std::string>(), j.at("t").get<Timestamp>(),
                  optional_number("prev"), optional_number("new")};
}

// Rejects malformed lines and unsorted or inconsistent logs.
inline Changelog ReadChangelogJsonl(std::istream& in) {
  std::vector<Mutation> mutations;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      mutations.push_back(MutationFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgumentError("changelog line " + std::to_string(line_no) +
                                 ": " + e.what());
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError("changelog line " + std::to_string(line_no) +
                                 ": " + e.what());
    }
  }
  return Changelog(std::move(mutations));
}

inline void WriteChangelogJsonl(const Changelog& log, std::ostream& out) {
  for (const auto& m : log) out << ToJson(m).dump() << '\n';
}

}  // namespace cldp
