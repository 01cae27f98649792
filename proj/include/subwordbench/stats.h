// Copyright 2026 The subwordbench Authors
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

#ifndef SUBWORDBENCH_STATS_H_
#define SUBWORDBENCH_STATS_H_

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subwordbench::stats {

enum class Metric { kBleu, kChrf3 };

std::string_view MetricName(Metric metric);
// Accepts "BLEU" and "CHRF3" (case-insensitive).
Metric ParseMetric(std::string_view name);

struct ScoreRecord {
  std::string task;
  std::string method;
  std::int64_t seed = 0;
  Metric metric = Metric::kBleu;
  double score = 0.0;
};

// (task, method, seed, metric) -> score. Tasks and methods keep their order
// of first appearance.
class ScoreTable {
 public:
  // Throws std::invalid_argument on a duplicate key.
  void Add(ScoreRecord record);

  const std::vector<ScoreRecord>& records() const { return records_; }
  const std::vector<std::string>& tasks() const { return tasks_; }
  const std::vector<std::string>& methods() const { return methods_; }
  bool Has(Metric metric) const;

  // Scores of one cell in insertion order.
  std::vector<double> Scores(std::string_view task, std::string_view method,
                             Metric metric) const;

 private:
  std::vector<ScoreRecord> records_;
  std::vector<std::string> tasks_;
  std::vector<std::string> methods_;
  std::map<std::string, bool> keys_;
};

// CSV with header `task,method,seed,metric,score`.
ScoreTable ReadScoreTable(std::istream& in, std::string_view source = "<stream>");
ScoreTable LoadScoreTable(const std::string& path);
void WriteScoreTable(const ScoreTable& table, std::ostream& out);

// Summary of a cell from a published mean and standard deviation.
struct CellAggregate {
  std::string task;
  std::string method;
  Metric metric;
  double mean;
  double sd;
};

// Draws `seeds_per_cell` scores per cell from Normal(mean, sd).
ScoreTable ResampleAggregates(std::span<const CellAggregate> cells,
                              int seeds_per_cell, std::uint64_t seed);

// Mid-ranks (1-based, ties averaged) of `values`.
std::vector<double> MidRanks(std::span<const double> values);
// Sum over tie groups of (t^3 - t).
double TieSum(std::span<const double> values);

struct KruskalWallisResult {
  double h = 0.0;
  double p = 1.0;
};

// Tie-corrected H with a chi-squared(k - 1) p-value. All-identical data
// gives H = 0, p = 1. Throws std::invalid_argument for fewer than two groups
// or an empty group.
KruskalWallisResult KruskalWallis(std::span<const std::vector<double>> groups);

struct DunnRow {
  std::string method;
  double mean = 0.0;
  double sd = 0.0;
  double mean_rank = 0.0;
  double z = 0.0;
  double p = 1.0;
};

struct DunnReport {
  std::string task;
  Metric metric = Metric::kBleu;
  std::string best_method;
  std::vector<DunnRow> rows;  // table method order
};

// Dunn's post-hoc comparison of every method against the method with the
// highest mean score: pooled mid-ranks with tie correction, two-sided normal
// p-values, no multiplicity adjustment.
DunnReport DunnsTest(const ScoreTable& table, std::string_view task, Metric metric);

// Lower-level form over raw groups; `best` indexes the reference group.
std::vector<DunnRow> DunnAgainst(std::span<const std::vector<double>> groups,
                                 std::size_t best);

// Per method, the number of (task, metric) cells where it is the best method
// or not significantly different from it (p > alpha). Methods in table order.
std::vector<std::pair<std::string, int>> BestCounts(
    const ScoreTable& table, std::span<const DunnReport> reports,
    double alpha = 0.05);

double Mean(std::span<const double> values);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double StdDev(std::span<const double> values);

}  // namespace subwordbench::stats

#endif  // SUBWORDBENCH_STATS_H_
