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

// Local-DP continual release of answer-histogram changes via randomized
// response.
//
// Each entry reports, per interval, its net answer mutation (prev, next) drawn
// through a column-stochastic rule P_m over the (z+1)^2 mutation space. The
// unbiased change estimate is  dv_hat = M_dv P_m^{-1} sum_x O_x,  where column
// j of M_dv is the histogram delta of mutation j.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cldp/accountant.hpp"
#include "cldp/changelog.hpp"
#include "cldp/errors.hpp"
#include "cldp/random.hpp"
#include "cldp/release.hpp"
#include "json.hpp"

namespace cldp {

class ResponseSpace {
 public:
  explicit ResponseSpace(std::vector<std::string> labels)
      : labels_(std::move(labels)) {
    if (labels_.size() < 2) {
      throw InvalidArgumentError("response space needs at least two answers");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second) {
        throw InvalidArgumentError("duplicate answer label '" + labels_[i] + "'");
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) {
      throw UnknownLabelError("unknown answer label '" + label + "'");
    }
    return it->second;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_;
};

// p(i, j) = Pr[report i | truth j]. Columns sum to one.
class ProbabilityMatrix {
 public:
  explicit ProbabilityMatrix(Eigen::MatrixXd p) : p_(std::move(p)) {
    if (p_.rows() != p_.cols() || p_.rows() < 1) {
      throw InvalidArgumentError("probability matrix must be square");
    }
    if ((p_.array() < 0.0).any() || !p_.allFinite()) {
      throw InvalidArgumentError("probabilities must be finite and >= 0");
    }
    for (Eigen::Index j = 0; j < p_.cols(); ++j) {
      if (std::fabs(p_.col(j).sum() - 1.0) > 1e-12) {
        throw InvalidArgumentError("probability matrix column " +
                                   std::to_string(j) + " does not sum to 1");
      }
    }
  }

  Eigen::Index size() const { return p_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return p_(i, j); }
  const Eigen::MatrixXd& matrix() const { return p_; }

 private:
  Eigen::MatrixXd p_;
};

// Diagonal e^eps / (n - 1 + e^eps), elsewhere 1 / (n - 1 + e^eps). Written in
// terms of e^-eps so large epsilon does not overflow.
inline ProbabilityMatrix OptimalRule(Eigen::Index n, double epsilon) {
  if (n < 2) throw InvalidArgumentError("randomized response needs n >= 2");
  if (!(epsilon > 0.0) || std::isnan(epsilon)) {
    throw InvalidEpsilonError("randomized response needs epsilon > 0");
  }
  const double shrink = std::exp(-epsilon);
  const double keep = 1.0 / (1.0 + static_cast<double>(n - 1) * shrink);
  const double flip = shrink * keep;
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(n, n, flip);
  p.diagonal().setConstant(keep);
  return ProbabilityMatrix(std::move(p));
}

// Closed-form inverse of OptimalRule: with p = a I + b 1 1^T and a + n b = 1,
// p^{-1} = (I - b 1 1^T) / a.
inline Eigen::MatrixXd OptimalRuleInverse(Eigen::Index n, double epsilon) {
  const ProbabilityMatrix p = OptimalRule(n, epsilon);
  const double b = p(1, 0);
  const double a = p(0, 0) - b;
  Eigen::MatrixXd inv = Eigen::MatrixXd::Constant(n, n, -b / a);
  inv.diagonal().array() += 1.0 / a;
  return inv;
}

// For delta = 0 the subset condition reduces to p(i,a) <= e^eps p(i,b) for
// every row i and column pair (a, b). A 1e-12 relative slack absorbs rounding
// in matrices built to sit exactly on the boundary.
inline bool VerifyDp(const ProbabilityMatrix& p, double epsilon) {
  const double factor = std::exp(epsilon) * (1.0 + 1e-12);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    for (Eigen::Index a = 0; a < p.size(); ++a) {
      for (Eigen::Index b = 0; b < p.size(); ++b) {
        if (p(i, a) > factor * p(i, b)) return false;
      }
    }
  }
  return true;
}

// Partial-pivot LU inverse; refuses matrices whose estimated condition number
// exceeds 1e12.
inline Eigen::MatrixXd InvertProbabilityMatrix(const ProbabilityMatrix& p) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.matrix());
  const double rcond = lu.rcond();
  if (!(rcond > 1e-12)) {
    throw SingularMatrixError("probability matrix is singular or "
                              "ill-conditioned (rcond " +
                              std::to_string(rcond) + ")");
  }
  return lu.inverse();
}

// (prev, next) pairs over answers plus null, row-major. Slot 0 is null and
// slot k is answer k - 1, so index 0 is (null, null), "no change".
class AnswerMutationSpace {
 public:
  explicit AnswerMutationSpace(ResponseSpace answers)
      : answers_(std::move(answers)) {}

  const ResponseSpace& answers() const { return answers_; }
  std::size_t slots() const { return answers_.size() + 1; }
  std::size_t size() const { return slots() * slots(); }

  static constexpr std::size_t kNoChange = 0;

  // Slots are 0 for null and 1 + answer index otherwise.
  std::size_t IndexOfSlots(std::size_t prev_slot, std::size_t next_slot) const {
    return prev_slot * slots() + next_slot;
  }
  std::pair<std::size_t, std::size_t> Slots(std::size_t index) const {
    return {index / slots(), index % slots()};
  }

  std::size_t Encode(const std::optional<std::string>& prev,
                     const std::optional<std::string>& next) const {
    return IndexOfSlots(prev ? answers_.index(*prev) + 1 : 0,
                        next ? answers_.index(*next) + 1 : 0);
  }

  Eigen::VectorXd OneHot(std::size_t index) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return v;
  }

 private:
  ResponseSpace answers_;
};

// z x (z+1)^2 matrix; column j is -1 at the previous answer and +1 at the
// next answer of mutation j.
inline Eigen::MatrixXd DeltaVMatrix(const AnswerMutationSpace& space) {
  const auto z = static_cast<Eigen::Index>(space.answers().size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(z, static_cast<Eigen::Index>(space.size()));
  for (std::size_t j = 0; j < space.size(); ++j) {
    const auto [prev, next] = space.Slots(j);
    const auto col = static_cast<Eigen::Index>(j);
    if (prev != 0) m(static_cast<Eigen::Index>(prev - 1), col) -= 1.0;
    if (next != 0) m(static_cast<Eigen::Index>(next - 1), col) += 1.0;
  }
  return m;
}

struct HistogramEstimate {
  Eigen::VectorXd values;
  // (1/N) A (diag(O_bar) - O_bar O_bar^T) A^T with A = M_dv P_m^{-1} and
  // O_bar the mean response one-hot vector.
  Eigen::MatrixXd covariance;
  // N A (diag(O_bar) - O_bar O_bar^T) A^T, the multinomial plug-in form.
  Eigen::MatrixXd multinomial_covariance;
};

// Precomputes A = M_dv P_m^{-1} for repeated estimates.
class DeltaVEstimator {
 public:
  DeltaVEstimator(const ProbabilityMatrix& p_m, const Eigen::MatrixXd& m_dv)
      : DeltaVEstimator(InvertProbabilityMatrix(p_m), m_dv, Tag{}) {
    if (m_dv.cols() != p_m.size()) {
      throw InvalidArgumentError("M_dv columns must match P_m size");
    }
  }

  const Eigen::MatrixXd& transform() const { return transform_; }
  Eigen::Index responses() const { return transform_.cols(); }

  Eigen::VectorXd Values(const Eigen::VectorXd& counts) const {
    return transform_ * counts;
  }

  HistogramEstimate Estimate(const Eigen::VectorXd& counts) const {
    HistogramEstimate out;
    out.values = transform_ * counts;
    const double total = counts.sum();
    const auto z = transform_.rows();
    if (total <= 0.0) {
      out.covariance = Eigen::MatrixXd::Zero(z, z);
      out.multinomial_covariance = Eigen::MatrixXd::Zero(z, z);
      return out;
    }
    const Eigen::VectorXd mean = counts / total;
    const Eigen::MatrixXd spread =
        Eigen::MatrixXd(mean.asDiagonal()) - mean * mean.transpose();
    const Eigen::MatrixXd core = transform_ * spread * transform_.transpose();
    out.covariance = core / total;
    out.multinomial_covariance = core * total;
    return out;
  }

  HistogramEstimate Estimate(std::span<const std::size_t> responses) const {
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(transform_.cols());
    for (std::size_t r : responses) {
      if (r >= static_cast<std::size_t>(counts.size())) {
        throw InvalidArgumentError("response index out of range");
      }
      counts(static_cast<Eigen::Index>(r)) += 1.0;
    }
    return Estimate(counts);
  }

 private:
  struct Tag {};
  DeltaVEstimator(Eigen::MatrixXd inverse, const Eigen::MatrixXd& m_dv, Tag)
      : transform_(m_dv * inverse) {}

  Eigen::MatrixXd transform_;
};

inline HistogramEstimate EstimateDeltaV(std::span<const std::size_t> responses,
                                        const ProbabilityMatrix& p_m,
                                        const Eigen::MatrixXd& m_dv) {
  return DeltaVEstimator(p_m, m_dv).Estimate(responses);
}

// Draws reports from the columns of a probability matrix.
class ResponseSampler {
 public:
  explicit ResponseSampler(const ProbabilityMatrix& p) {
    const auto n = p.size();
    cumulative_.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      auto& col = cumulative_[static_cast<std::size_t>(j)];
      col.resize(static_cast<std::size_t>(n));
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += p(i, j);
        col[static_cast<std::size_t>(i)] = acc;
      }
      col.back() = 1.0;
    }
  }

  std::size_t Sample(std::size_t truth, RandomStream& stream) const {
    const auto& col = cumulative_.at(truth);
    const double u = stream.Uniform();
    return static_cast<std::size_t>(
        std::upper_bound(col.begin(), col.end(), u) - col.begin());
  }

 private:
  std::vector<std::vector<double>> cumulative_;
};

struct AnswerRecord {
  EntryId entry;
  Timestamp time = 0;
  std::optional<std::string> answer;  // null: the entry leaves
};

// Per-entry answer timelines. The answer at t is the last record at or before
// t; before its first record an entry has no answer.
class AnswerLog {
 public:
  AnswerLog(const ResponseSpace& space, std::vector<AnswerRecord> records) {
    std::sort(records.begin(), records.end(),
              [](const AnswerRecord& a, const AnswerRecord& b) {
                return std::tie(a.entry, a.time) < std::tie(b.entry, b.time);
              });
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (i > 0 && records[i - 1].entry == r.entry && records[i - 1].time == r.time) {
        throw InvalidArgumentError("entry '" + r.entry +
                                   "' has two answers at t=" + std::to_string(r.time));
      }
      std::optional<std::size_t> answer;
      if (r.answer) answer = space.index(*r.answer);
      timelines_[r.entry].push_back({r.time, answer});
    }
  }

  std::size_t entry_count() const { return timelines_.size(); }

  // Slot of entry's answer at t: 0 for none, 1 + answer index otherwise.
  std::size_t SlotAt(const EntryId& entry, std::optional<Timestamp> t) const {
    if (!t) return 0;
    const auto& line = timelines_.at(entry);
    auto it = std::upper_bound(line.begin(), line.end(), *t,
                               [](Timestamp v, const Point& p) { return v < p.time; });
    if (it == line.begin()) return 0;
    const auto& answer = std::prev(it)->answer;
    return answer ? *answer + 1 : 0;
  }

  // Net mutation index of `entry` over (from, to]; (null, null) if unchanged.
  std::size_t NetMutation(const EntryId& entry, std::optional<Timestamp> from,
                          Timestamp to, const AnswerMutationSpace& space) const {
    const std::size_t before = SlotAt(entry, from);
    const std::size_t after = SlotAt(entry, to);
    if (before == after) return AnswerMutationSpace::kNoChange;
    return space.IndexOfSlots(before, after);
  }

  // True histogram of answers at t.
  Eigen::VectorXd HistogramAt(Timestamp t, std::size_t z) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z));
    for (const auto& [id, line] : timelines_) {
      const std::size_t slot = SlotAt(id, t);
      if (slot != 0) v(static_cast<Eigen::Index>(slot - 1)) += 1.0;
    }
    return v;
  }

  // Answer changes as a changelog (value = answer index) for constraint checks.
  Changelog ToChangelog() const {
    std::vector<Mutation> muts;
    for (const auto& [id, line] : timelines_) {
      std::optional<double> current;
      for (const auto& point : line) {
        std::optional<double> next;
        if (point.answer) next = static_cast<double>(*point.answer);
        if (next == current) continue;
        muts.push_back({id, point.time, current, next});
        current = next;
      }
    }
    std::sort(muts.begin(), muts.end(), MutationOrder);
    return Changelog(std::move(muts));
  }

  std::vector<EntryId> entries() const {
    std::vector<EntryId> ids;
    for (const auto& kv : timelines_) ids.push_back(kv.first);
    return ids;
  }

 private:
  struct Point {
    Timestamp time;
    std::optional<std::size_t> answer;
  };
  std::map<EntryId, std::vector<Point>> timelines_;
};

// {"entry":"<id>","t":<int>,"answer":<label|null>} per line.
inline std::vector<AnswerRecord> ReadAnswerRecordsJsonl(std::istream& in) {
  std::vector<AnswerRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      AnswerRecord r;
      r.entry = j.at("entry").get<std::string>();
      if (!j.at("t").is_number_integer()) {
        throw InvalidArgumentError("field 't' must be an integer");
      }
      r.time = j.at("t").get<Timestamp>();
      const auto& a = j.at("answer");
      if (a.is_string()) {
        r.answer = a.get<std::string>();
      } else if (!a.is_null()) {
        r.answer = a.dump();
      }
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgumentError("answer line " + std::to_string(line_no) +
                                 ": " + e.what());
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError("answer line " + std::to_string(line_no) +
                                 ": " + e.what());
    }
  }
  return records;
}

struct RrInterval {
  TimeRangeFilter filter;
  HistogramEstimate delta;
  Eigen::VectorXd true_delta;
  Eigen::VectorXd cumulative;           // sum of delta values so far
  Eigen::VectorXd cumulative_variance;  // sum of covariance diagonals so far
};

struct RrRelease {
  std::vector<RrInterval> intervals;
};

namespace internal {

// Samples one report per entry for its net mutation over (from, to] and
// accumulates the report counts and the true histogram change.
inline void SampleInterval(const AnswerLog& log, const AnswerMutationSpace& space,
                           const ResponseSampler& sampler,
                           std::optional<Timestamp> from, Timestamp to,
                           const RandomStream& interval_root,
                           Eigen::VectorXd& counts, Eigen::VectorXd& truth) {
  counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
  truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.answers().size()));
  for (const auto& id : log.entries()) {
    const std::size_t m = log.NetMutation(id, from, to, space);
    const auto [prev, next] = space.Slots(m);
    if (prev != 0) truth(static_cast<Eigen::Index>(prev - 1)) -= 1.0;
    if (next != 0) truth(static_cast<Eigen::Index>(next - 1)) += 1.0;
    RandomStream stream = interval_root.Substream(id);
    counts(static_cast<Eigen::Index>(sampler.Sample(m, stream))) += 1.0;
  }
}

}  // namespace internal

// Disjoint release of dv_hat over the schedule's ranges. Each entry reports
// once per range, even when unchanged, using the epsilon-optimal rule over
// the (z+1)^2 mutation space.
inline RrRelease RrDcr(const AnswerLog& log, const ResponseSpace& answers,
                       const ReleaseSchedule& schedule, double epsilon,
                       std::uint64_t seed) {
  const AnswerMutationSpace space(answers);
  const ProbabilityMatrix p_m =
      OptimalRule(static_cast<Eigen::Index>(space.size()), epsilon);
  const DeltaVEstimator estimator(p_m, DeltaVMatrix(space));
  const ResponseSampler sampler(p_m);
  const RandomStream root = RandomStream(seed).Substream("rr-dcr");
  const auto z = static_cast<Eigen::Index>(answers.size());

  RrRelease out;
  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(z);
  Eigen::VectorXd cumulative_var = Eigen::VectorXd::Zero(z);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const TimeRangeFilter f = schedule.filter(i);
    Eigen::VectorXd counts, truth;
    internal::SampleInterval(log, space, sampler, f.start(), f.end(),
                             root.Substream(i), counts, truth);
    HistogramEstimate est = estimator.Estimate(counts);
    cumulative += est.values;
    cumulative_var += est.covariance.diagonal();
    out.intervals.push_back(
        {f, std::move(est), std::move(truth), cumulative, cumulative_var});
  }
  return out;
}

struct RrPoint {
  Timestamp time = 0;
  Eigen::VectorXd estimate;  // v_hat at time, relative to t_s
  Eigen::VectorXd variance;  // sum of node covariance diagonals
  std::int64_t node_count = 0;
};

struct RrHdcrRelease {
  HdcrParams params;
  std::vector<std::vector<HistogramEstimate>> nodes;  // [layer][index]
  std::vector<RrPoint> series;  // one point per bottom-layer endpoint
};

// Every HDCR node releases dv_hat over its span; v_hat at t_s + r W sums
// the cover of (0, r].
inline RrHdcrRelease RrHdcr(const AnswerLog& log, const ResponseSpace& answers,
                            const HdcrParams& params, double epsilon_per_node,
                            std::uint64_t seed) {
  params.Validate();
  if (params.layer_size(0) > internal::Powers(params.branching, params.height).back()) {
    throw RangeTooWideError("HDCR span exceeds c^h bottom intervals; prefix "
                            "ranges could not be covered");
  }
  const AnswerMutationSpace space(answers);
  const ProbabilityMatrix p_m =
      OptimalRule(static_cast<Eigen::Index>(space.size()), epsilon_per_node);
  const DeltaVEstimator estimator(p_m, DeltaVMatrix(space));
  const ResponseSampler sampler(p_m);
  const RandomStream root = RandomStream(seed).Substream("rr-hdcr");
  const auto z = static_cast<Eigen::Index>(answers.size());

  RrHdcrRelease out{params, {}, {}};
  out.nodes.resize(static_cast<std::size_t>(params.height));
  for (int layer = 0; layer < params.height; ++layer) {
    const RandomStream layer_root = root.Substream(static_cast<std::uint64_t>(layer));
    for (std::int64_t j = 0; j < params.layer_size(layer); ++j) {
      const TimeRangeFilter f = HdcrNodeFilter(params, {layer, j});
      Eigen::VectorXd counts, truth;
      internal::SampleInterval(log, space, sampler, f.start(), f.end(),
                               layer_root.Substream(static_cast<std::uint64_t>(j)),
                               counts, truth);
      out.nodes[static_cast<std::size_t>(layer)].push_back(estimator.Estimate(counts));
    }
  }
  const std::int64_t n = params.layer_size(0);
  for (std::int64_t r = 1; r <= n; ++r) {
    const RangeCover cover = CoverRange(0, r, params.branching, params.height);
    RrPoint point{std::min(params.start + r * params.width, params.start + params.span),
                  Eigen::VectorXd::Zero(z), Eigen::VectorXd::Zero(z),
                  static_cast<std::int64_t>(cover.size())};
    for (const auto& id : cover.nodes) {
      const auto& node = out.nodes[static_cast<std::size_t>(id.layer)]
                                  [static_cast<std::size_t>(id.index)];
      point.estimate += node.values;
      point.variance += node.covariance.diagonal();
    }
    out.series.push_back(std::move(point));
  }
  return out;
}

}  // namespace cldp
