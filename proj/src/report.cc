// Copyright 2026 The pegbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pegbench/report.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace pegbench::report {
namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<ConditionSummary> Summarize(const EvalReport& report) {
  using Key = std::pair<std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const Row*>> groups;
  std::map<std::pair<std::string, int>, double> canonical;
  for (const Row& r : report.rows) {
    const Key key{r.model, r.condition};
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
    if (r.condition == "canonical") canonical[{r.model, r.seed}] = r.stats.success_rate();
  }
  std::vector<ConditionSummary> out;
  for (const Key& key : order) {
    const auto& rows = groups[key];
    ConditionSummary s;
    s.model = key.first;
    s.condition = key.second;
    s.seeds = static_cast<int>(rows.size());
    for (const Row* r : rows) s.mean += r->stats.success_rate();
    s.mean /= s.seeds;
    if (s.seeds > 1) {
      double ss = 0.0;
      for (const Row* r : rows) ss += std::pow(r->stats.success_rate() - s.mean, 2);
      s.stddev = std::sqrt(ss / (s.seeds - 1));
    }
    std::vector<double> canon, var;
    for (const Row* r : rows) {
      const auto it = canonical.find({r->model, r->seed});
      if (it == canonical.end()) continue;
      canon.push_back(it->second);
      var.push_back(r->stats.success_rate());
    }
    if (!canon.empty()) s.pct_change = trainer::MeanPctChange(canon, var);
    out.push_back(s);
  }
  return out;
}

nlohmann::json ToJson(const EvalReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const Row& r : report.rows) {
    rows.push_back({{"model", r.model},
                    {"condition", r.condition},
                    {"seed", r.seed},
                    {"stats", trainer::ToJson(r.stats)}});
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const ConditionSummary& s : Summarize(report)) {
    summary.push_back({{"model", s.model},
                       {"condition", s.condition},
                       {"seeds", s.seeds},
                       {"mean", s.mean},
                       {"stddev", s.stddev},
                       {"pct_change", s.pct_change ? nlohmann::json(*s.pct_change) : nullptr}});
  }
  return {{"matrix", report.matrix}, {"config", report.config}, {"rows", rows}, {"summary", summary}};
}

EvalReport ReportFromJson(const nlohmann::json& j) {
  EvalReport report;
  report.matrix = j.at("matrix").get<std::string>();
  report.config = j.value("config", nlohmann::json::object());
  for (const auto& r : j.at("rows")) {
    report.rows.push_back({r.at("model").get<std::string>(), r.at("condition").get<std::string>(),
                           r.at("seed").get<int>(), trainer::EvalStatsFromJson(r.at("stats"))});
  }
  return report;
}

std::string ToCsv(const EvalReport& report) {
  std::map<std::pair<std::string, int>, double> canonical;
  for (const Row& r : report.rows) {
    if (r.condition == "canonical") canonical[{r.model, r.seed}] = r.stats.success_rate();
  }
  std::ostringstream out;
  out << "model,condition,seed,attempts,successes,horizon,force_torque,success_rate,pct_change\n";
  for (const Row& r : report.rows) {
    out << r.model << ',' << r.condition << ',' << r.seed << ',' << r.stats.attempts << ','
        << r.stats.successes << ',' << r.stats.horizon << ',' << r.stats.force_torque << ','
        << Fixed(r.stats.success_rate(), 4) << ',';
    const auto it = canonical.find({r.model, r.seed});
    if (it != canonical.end()) {
      if (const auto pct = trainer::PctChange(it->second, r.stats.success_rate())) {
        out << Fixed(*pct, 4);
      }
    }
    out << '\n';
  }
  return out.str();
}

std::string ToMarkdown(const EvalReport& report) {
  std::ostringstream out;
  out << "# " << report.matrix << "\n\n";
  out << "| model | condition | seeds | success (mean ± std) | pct_change |\n";
  out << "|---|---|---|---|---|\n";
  for (const ConditionSummary& s : Summarize(report)) {
    out << "| " << s.model << " | " << s.condition << " | " << s.seeds << " | " << Fixed(s.mean, 3)
        << " ± " << Fixed(s.stddev, 3) << " | "
        << (s.pct_change ? Fixed(100.0 * *s.pct_change, 1) + "%" : std::string("undefined"))
        << " |\n";
  }
  out << "\npct_change is computed per seed against that seed's canonical success, then "
         "averaged over seeds with a nonzero canonical success.\n";
  return out.str();
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw IoError("cannot write " + path.string());
}

void WriteReport(const EvalReport& report, const std::filesystem::path& dir) {
  WriteTextFile(dir / "summary.md", ToMarkdown(report));
  WriteTextFile(dir / "results.csv", ToCsv(report));
  WriteTextFile(dir / "results.json", ToJson(report).dump(2) + "\n");
}

}  // namespace pegbench::report
