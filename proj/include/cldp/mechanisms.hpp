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

// Linear-query change over mutation batches, its sensitivity, and the
// Laplace mechanism.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "cldp/changelog.hpp"
#include "cldp/errors.hpp"
#include "cldp/random.hpp"

namespace cldp {

struct IdentityFn {};

// 1 when lo <= value <= hi, else 0.
struct IndicatorFn {
  double lo = 0.0;
  double hi = 0.0;
};

struct SecondMomentFn {};

// Exact-match lookup; values missing from the table map to `fallback`.
struct TableFn {
  std::map<double, double> table;
  double fallback = 0.0;
};

using ValueFunction = std::variant<IdentityFn, IndicatorFn, SecondMomentFn, TableFn>;

// f together with its truncation range [lower, upper]. The range must contain
// f(null) = 0 so that one mutation moves the query by at most upper - lower.
class LinearQuerySpec {
 public:
  LinearQuerySpec(ValueFunction f, double lower, double upper)
      : f_(std::move(f)), lower_(lower), upper_(upper) {
    if (!(lower_ <= upper_)) {
      throw InvalidArgumentError("query bounds need lower <= upper");
    }
    if (lower_ > 0.0 || upper_ < 0.0) {
      throw InvalidArgumentError(
          "query bounds must contain 0, the value of f(null)");
    }
  }

  static LinearQuerySpec Counting() { return {IndicatorFn{-HUGE_VAL, HUGE_VAL}, 0.0, 1.0}; }

  const ValueFunction& function() const { return f_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  // f(v) truncated into [lower, upper]; 0 for null.
  double Contribution(std::optional<double> value) const {
    if (!value) return 0.0;
    const double raw = std::visit(
        [&](const auto& fn) -> double {
          using T = std::decay_t<decltype(fn)>;
          if constexpr (std::is_same_v<T, IdentityFn>) {
            return *value;
          } else if constexpr (std::is_same_v<T, IndicatorFn>) {
            return (fn.lo <= *value && *value <= fn.hi) ? 1.0 : 0.0;
          } else if constexpr (std::is_same_v<T, SecondMomentFn>) {
            return *value * *value;
          } else {
            auto it = fn.table.find(*value);
            return it == fn.table.end() ? fn.fallback : it->second;
          }
        },
        f_);
    return std::clamp(raw, lower_, upper_);
  }

 private:
  ValueFunction f_;
  double lower_;
  double upper_;
};

// Sum over the batch of f(new) - f(prev), folded in batch order.
inline double LinearQueryChange(std::span<const Mutation> mutations,
                                const LinearQuerySpec& spec) {
  double change = 0.0;
  for (const auto& m : mutations) {
    change -= spec.Contribution(m.prev);
    change += spec.Contribution(m.next);
  }
  return change;
}

inline double Sensitivity(const LinearQuerySpec& spec) {
  return spec.upper() - spec.lower();
}

enum class NoiseKind { kLaplace };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kLaplace;
  double epsilon = 1.0;
  double sensitivity = 1.0;
  std::uint64_t seed = 0;

  void Validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw InvalidNoiseError("noise epsilon must be finite and > 0");
    }
    if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
      throw InvalidNoiseError("noise sensitivity must be finite and > 0");
    }
  }

  double scale() const { return sensitivity / epsilon; }

  // Variance of one noise draw, 2 (s / eps)^2.
  double variance() const { return 2.0 * scale() * scale(); }
};

inline NoiseSpec LaplaceNoise(double epsilon, double sensitivity,
                              std::uint64_t seed) {
  NoiseSpec n{NoiseKind::kLaplace, epsilon, sensitivity, seed};
  n.Validate();
  return n;
}

// value + Laplace(0, sensitivity / epsilon) drawn from `stream`.
inline double Perturb(double value, const NoiseSpec& noise,
                      RandomStream& stream) {
  noise.Validate();
  return value + stream.Laplace(noise.scale());
}

}  // namespace cldp
