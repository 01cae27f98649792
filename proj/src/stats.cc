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

#include "subwordbench/stats.h"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "subwordbench/error.h"

namespace subwordbench::stats {
namespace {

std::string Key(std::string_view task, std::string_view method, std::int64_t seed,
                Metric metric) {
  std::ostringstream os;
  os << task << '\x1f' << method << '\x1f' << seed << '\x1f' << MetricName(metric);
  return os.str();
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string Trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

std::string_view MetricName(Metric metric) {
  return metric == Metric::kBleu ? "BLEU" : "CHRF3";
}

Metric ParseMetric(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "BLEU") return Metric::kBleu;
  if (upper == "CHRF3" || upper == "CHRF") return Metric::kChrf3;
  throw std::invalid_argument("unknown metric: " + std::string(name));
}

void ScoreTable::Add(ScoreRecord record) {
  const auto key = Key(record.task, record.method, record.seed, record.metric);
  if (!keys_.emplace(key, true).second) {
    throw std::invalid_argument("duplicate score record for " + record.task + "/" +
                                record.method + " seed " +
                                std::to_string(record.seed));
  }
  if (std::find(tasks_.begin(), tasks_.end(), record.task) == tasks_.end()) {
    tasks_.push_back(record.task);
  }
  if (std::find(methods_.begin(), methods_.end(), record.method) == methods_.end()) {
    methods_.push_back(record.method);
  }
  records_.push_back(std::move(record));
}

bool ScoreTable::Has(Metric metric) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const ScoreRecord& r) { return r.metric == metric; });
}

std::vector<double> ScoreTable::Scores(std::string_view task, std::string_view method,
                                       Metric metric) const {
  std::vector<double> scores;
  for (const auto& r : records_) {
    if (r.task == task && r.method == method && r.metric == metric) {
      scores.push_back(r.score);
    }
  }
  return scores;
}

ScoreTable ReadScoreTable(std::istream& in, std::string_view source) {
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  const auto where = [&] { return std::string(source) + ":" + std::to_string(line_no); };
  if (!std::getline(in, line)) throw FormatError(std::string(source) + ": empty score file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "task,method,seed,metric,score") {
    throw FormatError(where() + ": expected header task,method,seed,metric,score");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const auto fields = SplitCsv(line);
    if (fields.size() != 5) throw FormatError(where() + ": expected 5 fields");
    ScoreRecord r;
    r.task = Trim(fields[0]);
    r.method = Trim(fields[1]);
    if (r.task.empty() || r.method.empty()) throw FormatError(where() + ": empty label");
    try {
      std::size_t used = 0;
      const auto seed_field = Trim(fields[2]);
      r.seed = std::stoll(seed_field, &used);
      if (used != seed_field.size()) throw std::invalid_argument("seed");
      r.metric = ParseMetric(Trim(fields[3]));
      const auto score_field = Trim(fields[4]);
      r.score = std::stod(score_field, &used);
      if (used != score_field.size() || !std::isfinite(r.score)) {
        throw std::invalid_argument("score");
      }
      table.Add(std::move(r));
    } catch (const std::exception& e) {
      throw FormatError(where() + ": " + e.what());
    }
  }
  return table;
}

ScoreTable LoadScoreTable(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return ReadScoreTable(in, path);
}

void WriteScoreTable(const ScoreTable& table, std::ostream& out) {
  out << "task,method,seed,metric,score\n";
  const auto precision = out.precision(17);
  for (const auto& r : table.records()) {
    out << r.task << ',' << r.method << ',' << r.seed << ',' << MetricName(r.metric)
        << ',' << r.score << '\n';
  }
  out.precision(precision);
}

ScoreTable ResampleAggregates(std::span<const CellAggregate> cells,
                              int seeds_per_cell, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ScoreTable table;
  for (const auto& cell : cells) {
    for (int s = 0; s < seeds_per_cell; ++s) {
      table.Add({cell.task, cell.method, s, cell.metric,
                 cell.mean + cell.sd * normal(rng)});
    }
  }
  return table;
}

std::vector<double> MidRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double TieSum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

KruskalWallisResult KruskalWallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw std::invalid_argument("need at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const auto ranks = MidRanks(pooled);
  const double n = static_cast<double>(pooled.size());
  const double correction = 1.0 - TieSum(pooled) / (n * n * n - n);
  if (correction <= 0.0) return {0.0, 1.0};
  double sum = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    offset += g.size();
    sum += rank_sum * rank_sum / static_cast<double>(g.size());
  }
  double h = (12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction;
  h = std::max(h, 0.0);
  const double df = static_cast<double>(groups.size() - 1);
  return {h, boost::math::gamma_q(df / 2.0, h / 2.0)};
}

double Mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double StdDev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = Mean(values);
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<DunnRow> DunnAgainst(std::span<const std::vector<double>> groups,
                                 std::size_t best) {
  if (groups.size() < 2) throw std::invalid_argument("need at least two groups");
  if (best >= groups.size()) throw std::out_of_range("reference group index");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("empty group");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const auto ranks = MidRanks(pooled);
  const double n = static_cast<double>(pooled.size());
  const double variance = n * (n + 1.0) / 12.0 - TieSum(pooled) / (12.0 * (n - 1.0));

  std::vector<DunnRow> rows(groups.size());
  std::size_t offset = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < groups[g].size(); ++i) rank_sum += ranks[offset + i];
    offset += groups[g].size();
    rows[g].mean = Mean(groups[g]);
    rows[g].sd = StdDev(groups[g]);
    rows[g].mean_rank = rank_sum / static_cast<double>(groups[g].size());
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g == best) continue;
    const double se = std::sqrt(variance * (1.0 / static_cast<double>(groups[best].size()) +
                                            1.0 / static_cast<double>(groups[g].size())));
    if (!(se > 0.0)) continue;  // all observations tied: z = 0, p = 1
    rows[g].z = (rows[best].mean_rank - rows[g].mean_rank) / se;
    rows[g].p = std::min(1.0, std::erfc(std::abs(rows[g].z) / std::sqrt(2.0)));
  }
  return rows;
}

DunnReport DunnsTest(const ScoreTable& table, std::string_view task, Metric metric) {
  DunnReport report;
  report.task = std::string(task);
  report.metric = metric;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> groups;
  for (const auto& method : table.methods()) {
    auto scores = table.Scores(task, method, metric);
    if (scores.empty()) continue;
    if (scores.size() < 2) {
      throw std::invalid_argument("Dunn's test needs >= 2 scores for " + method +
                                  " on " + std::string(task));
    }
    methods.push_back(method);
    groups.push_back(std::move(scores));
  }
  if (groups.size() < 2) {
    throw std::invalid_argument("Dunn's test needs >= 2 methods for " + std::string(task));
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < groups.size(); ++g) {
    if (Mean(groups[g]) > Mean(groups[best])) best = g;
  }
  report.best_method = methods[best];
  report.rows = DunnAgainst(groups, best);
  for (std::size_t g = 0; g < groups.size(); ++g) report.rows[g].method = methods[g];
  return report;
}

std::vector<std::pair<std::string, int>> BestCounts(const ScoreTable& table,
                                                    std::span<const DunnReport> reports,
                                                    double alpha) {
  std::vector<std::pair<std::string, int>> counts;
  for (const auto& method : table.methods()) counts.emplace_back(method, 0);
  for (const auto& report : reports) {
    for (const auto& row : report.rows) {
      if (row.method != report.best_method && !(row.p > alpha)) continue;
      for (auto& [method, count] : counts) {
        if (method == row.method) ++count;
      }
    }
  }
  return counts;
}

}  // namespace subwordbench::stats
