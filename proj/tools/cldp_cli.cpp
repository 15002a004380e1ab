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

// cldp: generate synthetic changelogs, run continual releases, account
// privacy loss, compare HDCR against SWCR, and run the oracle suite.
//
// Every subcommand accepts --config <file.json>. Nested sections are
// flattened to their leaf keys (release.epsilon -> --epsilon) and flags given
// on the command line take precedence.
//
// Exit codes: 0 ok, 1 input/runtime error, 2 config error, 3 constraint
// violation, 4 verification failure.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cldp/cldp.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConstraint = 3;
constexpr int kExitVerify = 4;

// Reads a JSON object, flattening nested sections. Keys use underscores;
// options use dashes. Keys no subcommand knows are rejected so typos surface.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::shared_ptr<const std::set<std::string>> known)
      : known_(std::move(known)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    return {};
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json root;
    try {
      root = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    Flatten(root, "", items);
    return items;
  }

 private:
  void Flatten(const json& node, const std::string& path,
               std::vector<CLI::ConfigItem>& items) const {
    for (const auto& [key, value] : node.items()) {
      const std::string field = path.empty() ? key : path + "." + key;
      if (value.is_object()) {
        Flatten(value, field, items);
        continue;
      }
      std::string name = key;
      std::replace(name.begin(), name.end(), '_', '-');
      if (!known_->count(name)) throw cldp::ConfigError(field, "unknown setting");
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      item.name = name;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(Scalar(v));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static std::string Scalar(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  }

  std::shared_ptr<const std::set<std::string>> known_;
};

std::ostream& OpenOutput(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
  return file;
}

std::ifstream OpenInput(const std::string& path, const std::string& field) {
  if (path.empty()) throw cldp::ConfigError(field, "an input file is required");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

cldp::MutationConstraint ConstraintOrThrow(const std::string& text) {
  if (text.empty()) {
    throw cldp::ConfigError("generator.constraint",
                            "a mutation constraint must be declared");
  }
  try {
    return cldp::ParseConstraint(text);
  } catch (const cldp::InvalidArgumentError& e) {
    throw cldp::ConfigError("generator.constraint", e.what());
  }
}

// ---------------------------------------------------------------- settings

struct PrivacySettings {
  double epsilon = 1.0;
  double delta = 0.0;
  std::string composition = "naive";
  double delta_slack = 1e-6;

  void Add(CLI::App& app) {
    app.add_option("--epsilon", epsilon, "Per-query (per-node, per-response) epsilon")
        ->capture_default_str();
    app.add_option("--delta", delta, "Per-query delta")->capture_default_str();
    app.add_option("--composition", composition, "naive | advanced")
        ->check(CLI::IsMember({"naive", "advanced"}))
        ->capture_default_str();
    app.add_option("--delta-slack", delta_slack, "Slack delta of advanced composition")
        ->capture_default_str();
  }

  cldp::PrivacyLoss Loss() const {
    if (!(epsilon > 0.0)) throw cldp::ConfigError("release.epsilon", "must be > 0");
    try {
      return cldp::PrivacyLoss::Make(epsilon, delta);
    } catch (const cldp::InvalidArgumentError& e) {
      throw cldp::ConfigError("release.delta", e.what());
    }
  }

  cldp::CompositionStrategy Strategy() const {
    if (composition == "advanced") {
      if (!(delta_slack > 0.0 && delta_slack < 1.0)) {
        throw cldp::ConfigError("release.delta_slack", "must lie in (0, 1)");
      }
      return cldp::AdvancedComposition{delta_slack};
    }
    return cldp::NaiveComposition{};
  }
};

struct ScheduleSettings {
  std::int64_t first = 0;  // t_1; 0 means "one interval after start"
  std::int64_t interval = 0;
  std::int64_t count = 10;
  std::int64_t period = 0;
  std::int64_t window = 0;
  int height = 0;
  int branching = 2;
  std::int64_t start = 0;
  std::int64_t span = 0;
  std::int64_t width = 0;

  void Add(CLI::App& app, bool with_branching) {
    app.add_option("--first", first, "Right end t_1 of the first query");
    app.add_option("--interval", interval, "DCR interval W");
    app.add_option("--count", count, "Number of queries n")->capture_default_str();
    app.add_option("--period", period, "SWCR period P");
    app.add_option("--window", window, "SWCR window W");
    app.add_option("--height", height, "HDCR height h");
    if (with_branching) {
      app.add_option("--branching", branching, "HDCR branching c")->capture_default_str();
    }
    app.add_option("--start", start, "HDCR start t_s")->capture_default_str();
    app.add_option("--span", span, "HDCR span T");
    app.add_option("--width", width, "HDCR bottom interval W");
  }

  template <typename Fn>
  static auto Checked(const std::string& field, Fn&& fn) {
    try {
      return fn();
    } catch (const cldp::InvalidArgumentError& e) {
      throw cldp::ConfigError(field, e.what());
    }
  }

  cldp::ReleaseSchedule Dcr() const {
    if (interval < 1) throw cldp::ConfigError("release.interval", "must be >= 1");
    return Checked("release.count", [&] {
      return cldp::ReleaseSchedule::Uniform(first ? first : interval, interval, count);
    });
  }

  cldp::SwcrParams Swcr() const {
    cldp::SwcrParams p{period, window, first ? first : window, count};
    return Checked("release.window", [&] {
      p.Validate();
      return p;
    });
  }

  cldp::HdcrParams Hdcr() const {
    cldp::HdcrParams p{height, branching, start, span, width};
    return Checked("release.height", [&] {
      p.Validate();
      cldp::internal::Powers(p.branching, p.height);
      return p;
    });
  }
};

template <typename Fn>
auto LoadInput(const std::string& path, const std::string& field, Fn&& read) {
  std::ifstream in = OpenInput(path, field);
  try {
    return read(in);
  } catch (const cldp::InvalidArgumentError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------- generate

struct GenerateCmd {
  std::string constraint;
  std::uint64_t seed = 0;
  std::int64_t entries = 100;
  std::int64_t horizon = 100;
  std::vector<double> value_range{0.0, 1.0};
  double mutation_rate = 0.5;
  double deletion_rate = 0.25;
  std::vector<std::string> labels;
  std::string path;

  void Add(CLI::App& app) {
    app.add_option("--seed", seed, "Random seed")->required();
    app.add_option("--constraint", constraint,
                   "atmost:<k> | bounded:<B> | comma list for a hybrid");
    app.add_option("--n-entries", entries, "Number of entries")->capture_default_str();
    app.add_option("--horizon", horizon, "Last tick T")->capture_default_str();
    app.add_option("--value-range", value_range, "Value range [a, b]")->expected(2);
    app.add_option("--mutation-rate", mutation_rate)->capture_default_str();
    app.add_option("--deletion-rate", deletion_rate)->capture_default_str();
    app.add_option("--labels", labels,
                   "Answer labels; emits answer timelines instead of a changelog");
    app.add_option("-o,--path,--out", path, "Output file (default stdout)");
  }

  int Run() const {
    cldp::GeneratorConfig cfg;
    cfg.entries = entries;
    cfg.horizon = horizon;
    cfg.constraint = ConstraintOrThrow(constraint);
    cfg.value_min = value_range.at(0);
    cfg.value_max = value_range.at(1);
    cfg.mutation_rate = mutation_rate;
    cfg.deletion_rate = deletion_rate;
    cfg.seed = seed;
    std::ofstream file;
    std::ostream& out = OpenOutput(path, file);
    if (!labels.empty()) {
      const cldp::ResponseSpace answers(labels);
      for (const auto& r : cldp::GenerateAnswers(cfg, answers)) {
        out << json{{"entry", r.entry},
                    {"t", r.time},
                    {"answer", r.answer ? json(*r.answer) : json(nullptr)}}
                   .dump()
            << '\n';
      }
    } else {
      cldp::WriteChangelogJsonl(cldp::GenerateChangelog(cfg), out);
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- run

struct RunCmd {
  std::string kind = "dcr";
  std::string changelog;
  std::string answers;
  std::vector<std::string> labels;
  std::string constraint;
  std::uint64_t seed = 0;
  bool local = false;
  PrivacySettings privacy;
  ScheduleSettings schedule;
  std::string hdcr_output = "nodes";
  std::string query = "identity";
  std::vector<double> bounds{0.0, 1.0};
  std::vector<double> query_range;
  std::string format = "csv";
  std::string path;
  bool include_exact = false;

  void Add(CLI::App& app) {
    app.add_option("--kind", kind, "dcr | swcr | hdcr | rr-dcr | rr-hdcr")
        ->check(CLI::IsMember({"dcr", "swcr", "hdcr", "rr-dcr", "rr-hdcr"}))
        ->capture_default_str();
    app.add_option("--changelog", changelog, "Changelog JSONL (dcr/swcr/hdcr)");
    app.add_option("--answers", answers, "Answer timeline JSONL (rr-dcr/rr-hdcr)");
    app.add_option("--labels", labels, "Answer labels, in histogram order");
    app.add_option("--constraint", constraint, "Declared mutation constraint");
    app.add_option("--seed", seed, "Random seed")->required();
    app.add_flag("--local", local, "Account local DP against one entry (2x folds)");
    privacy.Add(app);
    schedule.Add(app, true);
    app.add_option("--hdcr-output", hdcr_output,
                   "hdcr: 'nodes', or 'swcr' windows (--period/--window) aggregated from nodes")
        ->check(CLI::IsMember({"nodes", "swcr"}))
        ->capture_default_str();
    app.add_option("--query", query, "identity | count | second-moment | indicator")
        ->check(CLI::IsMember({"identity", "count", "second-moment", "indicator"}))
        ->capture_default_str();
    app.add_option("--bounds", bounds, "Truncation range [a, b] of f")->expected(2);
    app.add_option("--query-range", query_range, "Indicator range [lo, hi]")->expected(2);
    app.add_option("--format", format, "csv | jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}))
        ->capture_default_str();
    app.add_option("-o,--path,--out", path, "Output file (default stdout)");
    app.add_flag("--include-exact", include_exact, "Also write un-noised values");
  }

  cldp::LinearQuerySpec Query() const {
    cldp::ValueFunction f = cldp::IdentityFn{};
    if (query == "count") {
      return cldp::LinearQuerySpec::Counting();
    } else if (query == "second-moment") {
      f = cldp::SecondMomentFn{};
    } else if (query == "indicator") {
      if (query_range.size() != 2) {
        throw cldp::ConfigError("release.query_range", "indicator needs [lo, hi]");
      }
      f = cldp::IndicatorFn{query_range[0], query_range[1]};
    }
    try {
      return cldp::LinearQuerySpec(f, bounds.at(0), bounds.at(1));
    } catch (const cldp::InvalidArgumentError& e) {
      throw cldp::ConfigError("release.bounds", e.what());
    }
  }

  json BaseHeader(const cldp::MutationConstraint& c) const {
    return json{{"kind", kind},
                {"seed", seed},
                {"constraint", cldp::ToString(c)},
                {"composition", privacy.composition},
                {"local", local}};
  }

  // Adds folds and the accounted total loss to the header.
  void Account(json& header, std::int64_t folds) const {
    const auto loss = privacy.Loss();
    const auto s = privacy.Strategy();
    const auto total = local ? cldp::LocalBound(folds, loss, s) : cldp::KFold(loss, folds, s);
    header["folds"] = local ? cldp::LocalFolds(folds) : folds;
    header["epsilon_total"] = total.epsilon;
    header["delta_total"] = total.delta;
  }

  static void RequireConstraint(const cldp::Changelog& log,
                                const cldp::MutationConstraint& c) {
    const auto verdict = cldp::ValidateConstraint(log, c);
    std::int64_t bad = 0;
    std::string first;
    for (const auto& [id, ok] : verdict) {
      if (!ok && bad++ == 0) first = id;
    }
    if (bad > 0) {
      throw cldp::ConstraintViolationError(
          std::to_string(bad) + " entries violate the declared constraint " +
          cldp::ToString(c) + " (first: '" + first + "'); no bound reported");
    }
  }

  int Run() {
    const auto c = ConstraintOrThrow(constraint);
    if (kind == "rr-dcr" || kind == "rr-hdcr") return RunRr(c);
    const auto spec = Query();
    const auto loss = privacy.Loss();
    const cldp::Changelog log = LoadInput(changelog, "release.changelog", [](std::istream& in) {
      return cldp::ReadChangelogJsonl(in);
    });
    RequireConstraint(log, c);

    json header = BaseHeader(c);
    header["epsilon"] = loss.epsilon;
    header["delta"] = loss.delta;
    header["sensitivity"] = cldp::Sensitivity(spec);
    const double s = cldp::Sensitivity(spec);
    if (!(s > 0.0)) throw cldp::ConfigError("release.bounds", "need a < b");
    const auto noise = cldp::LaplaceNoise(loss.epsilon, s, seed);
    cldp::ReleaseResult result;
    if (kind == "dcr") {
      const auto sched = schedule.Dcr();
      header["interval"] = schedule.interval;
      header["count"] = schedule.count;
      Account(header, cldp::DcrFolds(sched, c));
      result = cldp::RunDcr(log, sched, spec, noise);
    } else if (kind == "swcr") {
      const auto p = schedule.Swcr();
      header["period"] = p.period;
      header["window"] = p.window;
      header["first"] = p.first_end;
      header["count"] = p.count;
      Account(header, cldp::SwcrFolds(p, c));
      result = cldp::RunSwcr(log, p, spec, noise);
    } else if (hdcr_output == "swcr") {
      const auto swcr = schedule.Swcr();
      const auto p = cldp::SwcrHdcrParams(swcr, schedule.branching);
      AddHdcrHeader(header, p, c);
      header["period"] = swcr.period;
      header["window"] = swcr.window;
      result = cldp::DeriveSwcrFromHdcr(log, swcr, p.branching, spec, noise);
    } else {
      const auto p = schedule.Hdcr();
      AddHdcrHeader(header, p, c);
      const auto tree = cldp::BuildHdcr(log, p, spec, noise);
      for (const auto& layer : tree.layers) {
        for (const auto& n : layer) result.records.push_back({n.filter, n.exact, n.noisy, {}, {}});
      }
    }
    std::ofstream file;
    std::ostream& out = OpenOutput(path, file);
    if (format == "csv") {
      cldp::WriteReleaseCsv(result, header, include_exact, out);
    } else {
      cldp::WriteReleaseJsonl(result, header, include_exact, out);
    }
    return kExitOk;
  }

  void AddHdcrHeader(json& header, const cldp::HdcrParams& p,
                     const cldp::MutationConstraint& c) const {
    header["height"] = p.height;
    header["branching"] = p.branching;
    header["start"] = p.start;
    header["span"] = p.span;
    header["width"] = p.width;
    Account(header, cldp::HdcrFolds(p, c));
    if (const auto* tb = std::get_if<cldp::TimeBounded>(&c.rule)) {
      header["closed_form_folds"] = cldp::HdcrClosedFormTimeBoundedFolds(p, tb->bound);
    }
  }

  // Randomized response is local: folds are always doubled.
  int RunRr(const cldp::MutationConstraint& c) {
    if (labels.size() < 2) throw cldp::ConfigError("release.labels", "need >= 2 labels");
    const auto loss = privacy.Loss();
    const cldp::ResponseSpace space(labels);
    const cldp::AnswerLog log(space, LoadInput(answers, "release.answers", [](std::istream& in) {
                                return cldp::ReadAnswerRecordsJsonl(in);
                              }));
    RequireConstraint(log.ToChangelog(), c);
    local = true;
    json header = BaseHeader(c);
    header["epsilon"] = loss.epsilon;
    header["labels"] = labels;

    struct Row {
      cldp::Timestamp t;
      Eigen::VectorXd estimate, variance, truth;
    };
    std::vector<Row> rows;
    const std::size_t z = labels.size();
    if (kind == "rr-dcr") {
      const auto sched = schedule.Dcr();
      header["interval"] = schedule.interval;
      header["count"] = schedule.count;
      Account(header, cldp::DcrFolds(sched, c));
      const auto rel = cldp::RrDcr(log, space, sched, loss.epsilon, seed);
      for (const auto& iv : rel.intervals) {
        rows.push_back({iv.filter.end(), iv.cumulative, iv.cumulative_variance,
                        log.HistogramAt(iv.filter.end(), z)});
      }
    } else {
      const auto p = schedule.Hdcr();
      header["height"] = p.height;
      header["branching"] = p.branching;
      header["start"] = p.start;
      header["span"] = p.span;
      header["width"] = p.width;
      Account(header, cldp::HdcrFolds(p, c));
      const auto rel = cldp::RrHdcr(log, space, p, loss.epsilon, seed);
      for (const auto& pt : rel.series) {
        rows.push_back({pt.time, pt.estimate, pt.variance,
                        log.HistogramAt(pt.time, z) - log.HistogramAt(p.start, z)});
      }
    }

    std::ofstream file;
    std::ostream& out = OpenOutput(path, file);
    out << std::setprecision(17);
    if (format == "jsonl") {
      out << json{{"header", header}}.dump() << '\n';
      for (const auto& r : rows) {
        json j{{"t", r.t},
               {"estimate", std::vector<double>(r.estimate.begin(), r.estimate.end())},
               {"variance", std::vector<double>(r.variance.begin(), r.variance.end())}};
        if (include_exact) j["exact"] = std::vector<double>(r.truth.begin(), r.truth.end());
        out << j.dump() << '\n';
      }
      return kExitOk;
    }
    for (const auto& [key, value] : header.items()) {
      out << "# " << key << "=" << value.dump() << '\n';
    }
    out << "t";
    for (const auto& l : labels) out << ",v_" << l;
    for (const auto& l : labels) out << ",var_" << l;
    if (include_exact) {
      for (const auto& l : labels) out << ",exact_" << l;
    }
    out << '\n';
    for (const auto& r : rows) {
      out << r.t;
      for (double v : r.estimate) out << ',' << v;
      for (double v : r.variance) out << ',' << v;
      if (include_exact) {
        for (double v : r.truth) out << ',' << v;
      }
      out << '\n';
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- account

struct AccountCmd {
  std::string constraint;
  PrivacySettings privacy;
  ScheduleSettings schedule;
  std::vector<int> branching{2};
  std::string format = "text";

  void Add(CLI::App& app) {
    app.add_option("--constraint", constraint, "Declared mutation constraint");
    privacy.Add(app);
    schedule.Add(app, false);
    app.add_option("--branching", branching, "Branching factors c to evaluate");
    app.add_option("--format", format, "text | json")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
  }

  json BoundRow(const std::string& kind, const std::string& constraint_text,
                std::int64_t folds) const {
    const auto loss = privacy.Loss();
    const auto s = privacy.Strategy();
    const auto global = cldp::KFold(loss, folds, s);
    const auto local = cldp::LocalBound(folds, loss, s);
    return json{{"kind", kind},
                {"constraint", constraint_text},
                {"folds", folds},
                {"epsilon", global.epsilon},
                {"delta", global.delta},
                {"local_folds", cldp::LocalFolds(folds)},
                {"local_epsilon", local.epsilon},
                {"local_delta", local.delta}};
  }

  int Run() const {
    const auto c = ConstraintOrThrow(constraint);
    privacy.Loss();
    std::vector<cldp::MutationConstraint> rows{c};
    if (const auto* h = std::get_if<cldp::Hybrid>(&c.rule)) {
      rows.insert(rows.end(), h->options.begin(), h->options.end());
    }
    json bounds = json::array();
    json compare = json::array();
    for (const auto& r : rows) {
      const std::string text = cldp::ToString(r);
      if (schedule.interval > 0) {
        bounds.push_back(BoundRow("dcr", text, cldp::DcrFolds(schedule.Dcr(), r)));
      }
      if (schedule.window > 0 || schedule.period > 0) {
        bounds.push_back(BoundRow("swcr", text, cldp::SwcrFolds(schedule.Swcr(), r)));
      }
      if (schedule.height > 0 || schedule.span > 0 || schedule.width > 0) {
        for (int cb : branching) {
          ScheduleSettings s = schedule;
          s.branching = cb;
          const auto p = s.Hdcr();
          json row = BoundRow("hdcr c=" + std::to_string(cb), text, cldp::HdcrFolds(p, r));
          if (const auto* tb = std::get_if<cldp::TimeBounded>(&r.rule)) {
            row["closed_form_folds"] = cldp::HdcrClosedFormTimeBoundedFolds(p, tb->bound);
          }
          bounds.push_back(row);
        }
      }
      if ((schedule.window > 0 || schedule.period > 0) && !r.is_hybrid()) {
        for (int cb : branching) {
          if (cb < 2) throw cldp::ConfigError("release.branching", "must be >= 2");
          const auto cmp = cldp::CompareHdcrSwcr(schedule.Swcr(), cb, r);
          compare.push_back(json{{"constraint", text},
                                 {"branching", cb},
                                 {"height", cmp.height},
                                 {"lhs", cmp.lhs},
                                 {"rhs", cmp.rhs},
                                 {"hdcr_wins", cmp.hdcr_wins},
                                 {"epsilon_prime_factor", cmp.epsilon_prime_factor}});
        }
      }
    }
    if (bounds.empty()) {
      throw cldp::ConfigError("release", "give --interval, --window/--period or "
                                         "--height/--span/--width");
    }
    if (format == "json") {
      std::cout << json{{"bounds", bounds}, {"compare", compare}}.dump(2) << '\n';
      return kExitOk;
    }
    std::cout << std::left << std::setw(10) << "kind" << std::setw(24) << "constraint"
              << std::setw(8) << "folds" << std::setw(14) << "epsilon" << std::setw(12)
              << "delta" << std::setw(8) << "local" << std::setw(14) << "local_eps"
              << "local_delta\n";
    for (const auto& b : bounds) {
      std::cout << std::setw(10) << b["kind"].get<std::string>() << std::setw(24)
                << b["constraint"].get<std::string>() << std::setw(8) << b["folds"].dump()
                << std::setw(14) << b["epsilon"].dump() << std::setw(12) << b["delta"].dump()
                << std::setw(8) << b["local_folds"].dump() << std::setw(14)
                << b["local_epsilon"].dump() << b["local_delta"].dump();
      if (b.contains("closed_form_folds")) {
        std::cout << "  closed_form_folds=" << b["closed_form_folds"].dump();
      }
      std::cout << '\n';
    }
    if (!compare.empty()) {
      std::cout << "\n" << std::setw(24) << "constraint" << std::setw(6) << "c" << std::setw(4)
                << "h" << std::setw(14) << "lhs" << std::setw(14) << "rhs" << std::setw(8)
                << "winner" << "eps'/eps\n";
      for (const auto& r : compare) {
        std::cout << std::setw(24) << r["constraint"].get<std::string>() << std::setw(6)
                  << r["branching"].dump() << std::setw(4) << r["height"].dump()
                  << std::setw(14) << r["lhs"].dump() << std::setw(14) << r["rhs"].dump()
                  << std::setw(8) << (r["hdcr_wins"].get<bool>() ? "hdcr" : "swcr")
                  << r["epsilon_prime_factor"].dump() << '\n';
      }
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- compare

struct CompareCmd {
  std::string constraint;
  std::uint64_t seed = 0;
  ScheduleSettings schedule;
  std::vector<int> branching{2};
  double epsilon = 1.0;
  double sensitivity = 1.0;
  std::int64_t trials = 10000;
  std::string path;

  void Add(CLI::App& app) {
    app.add_option("--constraint", constraint, "atmost:<k> or bounded:<B>");
    app.add_option("--seed", seed, "Random seed")->required();
    schedule.Add(app, false);
    app.add_option("--branching", branching, "Branching factors c")->capture_default_str();
    app.add_option("--epsilon", epsilon, "SWCR per-query epsilon")->capture_default_str();
    app.add_option("--sensitivity", sensitivity)->capture_default_str();
    app.add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
    app.add_option("-o,--path,--out", path, "Output CSV (default stdout)");
  }

  int Run() const {
    const auto c = ConstraintOrThrow(constraint);
    if (c.is_hybrid()) {
      throw cldp::ConfigError("generator.constraint",
                              "compare needs atmost:<k> or bounded:<B>");
    }
    if (!(epsilon > 0.0)) throw cldp::ConfigError("release.epsilon", "must be > 0");
    if (trials < 100) throw cldp::ConfigError("release.trials", "must be >= 100");
    const auto swcr = schedule.Swcr();
    std::ofstream file;
    std::ostream& out = OpenOutput(path, file);
    out << std::setprecision(10);
    out << "c,h,lhs,rhs,hdcr_wins,swcr_folds,hdcr_folds,epsilon_swcr,epsilon_node,"
           "var_swcr_theory,var_hdcr_theory,var_swcr_mc,var_hdcr_mc\n";
    for (int cb : branching) {
      if (cb < 2) throw cldp::ConfigError("release.branching", "must be >= 2");
      const auto r = cldp::CompareWindowVariance(swcr, cb, c, epsilon, sensitivity,
                                                 trials, seed);
      out << cb << ',' << r.predicate.height << ',' << r.predicate.lhs << ','
          << r.predicate.rhs << ',' << (r.predicate.hdcr_wins ? "true" : "false") << ','
          << r.swcr_folds << ',' << r.hdcr_folds << ',' << r.swcr_epsilon << ','
          << r.hdcr_epsilon << ',' << r.swcr_theory << ',' << r.hdcr_theory << ','
          << r.swcr_empirical << ',' << r.hdcr_empirical << '\n';
    }
    return kExitOk;
  }
};

// ---------------------------------------------------------------- verify

struct VerifyCmd {
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  std::string fault = "none";

  void Add(CLI::App& app) {
    app.add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--inject-fault", fault, "Test hook: none | cover-off-by-one")
        ->check(CLI::IsMember({"none", "cover-off-by-one"}))
        ->capture_default_str();
  }

  int Run() const {
    if (trials < 100) throw cldp::ConfigError("verify.trials", "must be >= 100");
    cldp::VerifyOptions opt;
    opt.trials = trials;
    opt.seed = seed;
    opt.fault = fault == "none" ? cldp::InjectedFault::kNone
                                : cldp::InjectedFault::kCoverOffByOne;
    const auto reports = cldp::RunVerifySuite(opt);
    bool ok = true;
    std::cout << std::left << std::setw(22) << "check" << std::setw(36) << "instance"
              << std::setw(14) << "expected" << std::setw(14) << "actual" << std::setw(12)
              << "tolerance" << "result\n";
    for (const auto& r : reports) {
      ok = ok && r.pass;
      std::cout << std::setw(22) << r.name << std::setw(36) << r.instance << std::setw(14)
                << r.expected << std::setw(14) << r.actual << std::setw(12) << r.tolerance
                << (r.pass ? "PASS" : "FAIL") << '\n';
    }
    std::cout << (ok ? "all checks passed" : "verification FAILED") << '\n';
    return ok ? kExitOk : kExitVerify;
  }
};

// ---------------------------------------------------------------- main

struct Command {
  std::string name;
  std::string description;
  std::unique_ptr<CLI::App> app;
  std::function<int()> run;
};

void Usage(const std::vector<Command>& commands) {
  std::cout << "usage: cldp <command> [options]   (cldp <command> --help)\n\ncommands:\n";
  for (const auto& c : commands) {
    std::cout << "  " << std::left << std::setw(10) << c.name << c.description << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  GenerateCmd generate;
  RunCmd run;
  AccountCmd account;
  CompareCmd compare;
  VerifyCmd verify;

  std::vector<Command> commands;
  auto add = [&](const std::string& name, const std::string& description, auto& cmd) {
    auto app = std::make_unique<CLI::App>(description, "cldp " + name);
    cmd.Add(*app);
    commands.push_back({name, description, std::move(app), [&cmd] { return cmd.Run(); }});
  };
  add("generate", "Write a synthetic changelog (or answer timelines) as JSONL", generate);
  add("run", "Run a continual release over a changelog", run);
  add("account", "Print privacy bounds and HDCR/SWCR verdicts", account);
  add("compare", "Monte Carlo HDCR vs SWCR window variance at equal privacy", compare);
  add("verify", "Run the oracle suite", verify);

  auto known = std::make_shared<std::set<std::string>>();
  for (const auto& c : commands) {
    for (const CLI::Option* opt : c.app->get_options()) {
      for (const auto& n : opt->get_lnames()) known->insert(n);
    }
  }
  for (auto& c : commands) {
    c.app->set_config("--config", "", "JSON config file");
    c.app->config_formatter(std::make_shared<JsonConfig>(known));
    c.app->allow_config_extras(CLI::config_extras_mode::ignore);
  }

  if (argc < 2 || std::string(argv[1]) == "--help" || std::string(argv[1]) == "-h") {
    Usage(commands);
    return argc < 2 ? kExitConfig : kExitOk;
  }
  const std::string name = argv[1];
  auto it = std::find_if(commands.begin(), commands.end(),
                         [&](const Command& c) { return c.name == name; });
  if (it == commands.end()) {
    std::cerr << "cldp: unknown command '" << name << "'\n";
    Usage(commands);
    return kExitConfig;
  }
  try {
    it->app->parse(argc - 1, argv + 1);
  } catch (const CLI::ParseError& e) {
    const int code = it->app->exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const cldp::ConfigError& e) {
    std::cerr << "cldp: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    return it->run();
  } catch (const cldp::ConfigError& e) {
    std::cerr << "cldp: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cldp::ConstraintViolationError& e) {
    std::cerr << "cldp: constraint violation: " << e.what() << '\n';
    return kExitConstraint;
  } catch (const cldp::ConsistencyError& e) {
    std::cerr << "cldp: inconsistent input: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const cldp::Error& e) {
    std::cerr << "cldp: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "cldp: " << e.what() << '\n';
    return kExitRuntime;
  }
}
