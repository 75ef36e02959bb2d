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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

namespace pegbench::report {
namespace {

namespace fs = std::filesystem;

trainer::EvalStats Stats(int successes, int attempts = 50) {
  return {.attempts = attempts, .successes = successes, .horizon = attempts - successes};
}

// two models, three seeds, two conditions
EvalReport Sample() {
  EvalReport r;
  r.matrix = "training-sets";
  r.config = {{"n_demos", 50}};
  const int canonical[2][3] = {{50, 40, 30}, {45, 0, 20}};
  const int grasp[2][3] = {{25, 30, 30}, {9, 5, 30}};
  for (int m = 0; m < 2; ++m) {
    for (int s = 0; s < 3; ++s) {
      const std::string model = m == 0 ? "base" : "base+grasp";
      r.rows.push_back({model, "canonical", s, Stats(canonical[m][s])});
      r.rows.push_back({model, "grasp", s, Stats(grasp[m][s])});
    }
  }
  return r;
}

TEST(Summarize, MeansAndPerSeedChange) {
  const auto summary = Summarize(Sample());
  ASSERT_EQ(summary.size(), 4u);
  EXPECT_EQ(summary[0].model, "base");
  EXPECT_EQ(summary[0].condition, "canonical");
  EXPECT_EQ(summary[1].condition, "grasp");
  EXPECT_EQ(summary[0].seeds, 3);
  EXPECT_NEAR(summary[0].mean, 0.8, 1e-12);
  // sample stddev of 1.0, 0.8, 0.6
  EXPECT_NEAR(summary[0].stddev, 0.2, 1e-12);
  EXPECT_NEAR(*summary[0].pct_change, 0.0, 1e-12);
  // per seed -0.5, -0.25, 0 averaged; the ratio of means would be -0.208
  EXPECT_NEAR(*summary[1].pct_change, -0.25, 1e-12);
  // seed 1 has zero canonical success and is skipped: (-0.8 + 0.5) / 2
  EXPECT_NEAR(*summary[3].pct_change, (9.0 / 45.0 - 1.0 + 0.5) / 2.0, 1e-12);
}

TEST(Summarize, MissingCanonicalIsUndefined) {
  EvalReport r;
  r.rows.push_back({"m", "grasp", 0, Stats(10)});
  const auto summary = Summarize(r);
  ASSERT_EQ(summary.size(), 1u);
  EXPECT_FALSE(summary[0].pct_change.has_value());
  EXPECT_EQ(summary[0].stddev, 0.0);
}

TEST(Report, JsonRoundTrip) {
  const EvalReport r = Sample();
  const nlohmann::json j = ToJson(r);
  EXPECT_EQ(j.at("summary").size(), 4u);
  EXPECT_EQ(ReportFromJson(j), r);
  EXPECT_EQ(ReportFromJson(nlohmann::json::parse(j.dump())), r);
}

TEST(Report, CsvHasOneRowPerEvaluation) {
  const std::string csv = ToCsv(Sample());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("model,condition,seed", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8) << line;
  }
  EXPECT_EQ(rows, 2 * 3 * 2);
  EXPECT_NE(csv.find("base,grasp,0,50,25,25,0,0.5000,-0.5000"), std::string::npos);
  // zero canonical leaves the change blank
  EXPECT_NE(csv.find("base+grasp,grasp,1,50,5,45,0,0.1000,\n"), std::string::npos);
}

TEST(Report, MarkdownTable) {
  const std::string md = ToMarkdown(Sample());
  EXPECT_NE(md.find("| model | condition | seeds |"), std::string::npos);
  EXPECT_NE(md.find("| base | grasp | 3 | 0.567"), std::string::npos);
  EXPECT_NE(md.find("-25.0%"), std::string::npos);
}

TEST(Report, WriteFiles) {
  const fs::path dir = fs::temp_directory_path() / "pegbench_report_test";
  fs::remove_all(dir);
  WriteReport(Sample(), dir);
  for (const char* f : {"summary.md", "results.csv", "results.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(ReportFromJson(nlohmann::json::parse(std::ifstream(dir / "results.json"))), Sample());
  fs::remove_all(dir);
}

}  // namespace
}  // namespace pegbench::report
