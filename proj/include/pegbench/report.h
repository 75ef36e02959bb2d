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

#ifndef PEGBENCH_REPORT_H_
#define PEGBENCH_REPORT_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pegbench/trainer.h"

namespace pegbench::report {

// One evaluation of one trained model (identified by `model` and `seed`)
// under one condition.
struct Row {
  std::string model;
  std::string condition;
  int seed = 0;
  trainer::EvalStats stats;
  bool operator==(const Row&) const = default;
};

struct EvalReport {
  std::string matrix;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Row> rows;
  bool operator==(const EvalReport&) const = default;
};

struct ConditionSummary {
  std::string model;
  std::string condition;
  int seeds = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one seed
  // Per-seed change against the same model and seed's canonical row, then
  // averaged. Absent without a canonical row or when it is zero.
  std::optional<double> pct_change;
};

// Groups rows by (model, condition) in first-appearance order.
std::vector<ConditionSummary> Summarize(const EvalReport& report);

nlohmann::json ToJson(const EvalReport& report);
EvalReport ReportFromJson(const nlohmann::json& j);

std::string ToCsv(const EvalReport& report);
std::string ToMarkdown(const EvalReport& report);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes summary.md, results.csv and results.json under dir.
void WriteReport(const EvalReport& report, const std::filesystem::path& dir);

void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace pegbench::report

#endif  // PEGBENCH_REPORT_H_
