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


#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "aggregates.h"
#include "oracles.h"
#include "subwordbench/error.h"
#include "subwordbench/stats.h"

namespace subwordbench::stats {
namespace {

std::vector<std::vector<double>> RandomGroups(std::mt19937_64& rng, bool ties) {
  const int k = 2 + static_cast<int>(rng() % 4);
  std::vector<std::vector<double>> groups(k);
  for (int g = 0; g < k; ++g) {
    const int n = 2 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      const double x = ties ? static_cast<double>(rng() % 4)
                            : std::uniform_real_distribution<double>(0, 10)(rng) + g;
      groups[g].push_back(x);
    }
  }
  return groups;
}

ScoreTable TableFrom(const std::vector<std::vector<double>>& groups, Metric metric = Metric::kBleu) {
  ScoreTable table;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t s = 0; s < groups[g].size(); ++s) {
      table.Add({"T", "m" + std::to_string(g), static_cast<std::int64_t>(s), metric, groups[g][s]});
    }
  }
  return table;
}

TEST(RankTest, MidRanksAndTies) {
  const std::vector<double> v = {3, 1, 3, 2, 3};
  EXPECT_EQ(MidRanks(v), (std::vector<double>{4, 1, 4, 2, 4}));
  EXPECT_DOUBLE_EQ(TieSum(v), 24.0);
}

TEST(KruskalWallisTest, MatchesOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const auto groups = RandomGroups(rng, trial % 2 == 1);
    const auto got = KruskalWallis(groups);
    const auto want = oracle::KruskalWallis(groups);
    EXPECT_NEAR(got.h, want.h, 1e-9);
    EXPECT_NEAR(got.p, want.p, 1e-9);
  }
}

TEST(KruskalWallisTest, SeparatedGroups) {
  const std::vector<std::vector<double>> groups = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const auto got = KruskalWallis(groups);
  EXPECT_NEAR(got.h, 7.2, 1e-12);
  EXPECT_NEAR(got.p, std::exp(-3.6), 1e-12);
}

TEST(KruskalWallisTest, IdenticalAndInvalid) {
  const std::vector<std::vector<double>> same = {{2, 2}, {2, 2}};
  const auto r = KruskalWallis(same);
  EXPECT_EQ(r.h, 0.0);
  EXPECT_EQ(r.p, 1.0);
  EXPECT_THROW(KruskalWallis(std::vector<std::vector<double>>{{1, 2}}), std::invalid_argument);
  EXPECT_THROW(KruskalWallis(std::vector<std::vector<double>>{{1, 2}, {}}), std::invalid_argument);
}

TEST(KruskalWallisTest, MonotoneTransformInvariance) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto groups = RandomGroups(rng, trial % 2 == 0);
    const double h = KruskalWallis(groups).h;
    for (auto& g : groups) {
      for (auto& x : g) x = std::exp(x / 3.0) + 5.0;
    }
    EXPECT_NEAR(KruskalWallis(groups).h, h, 1e-9);
  }
}

TEST(DunnTest, MatchesOracle) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const auto groups = RandomGroups(rng, trial % 2 == 1);
    const std::size_t best = rng() % groups.size();
    const auto rows = DunnAgainst(groups, best);
    ASSERT_EQ(rows.size(), groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (g == best) {
        EXPECT_EQ(rows[g].p, 1.0);
        continue;
      }
      const auto want = oracle::Dunn(groups, best, g);
      EXPECT_NEAR(rows[g].z, want.z, 1e-9);
      EXPECT_NEAR(rows[g].p, want.p, 1e-9);
      EXPECT_GE(rows[g].p, 0.0);
      EXPECT_LE(rows[g].p, 1.0);
    }
  }
}

TEST(DunnTest, ShiftedGroupIsBestAndDistantGroupsSignificant) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0, 1);
  std::vector<std::vector<double>> groups(4);
  for (int g = 0; g < 4; ++g) {
    for (int s = 0; s < 5; ++s) groups[g].push_back((g == 2 ? 50.0 : 0.0) + noise(rng));
  }
  const auto report = DunnsTest(TableFrom(groups), "T", Metric::kBleu);
  EXPECT_EQ(report.best_method, "m2");
  EXPECT_EQ(report.rows[2].p, 1.0);
  int significant = 0;
  for (int g : {0, 1, 3}) significant += report.rows[g].p < 0.05;
  EXPECT_GE(significant, 2);
}

TEST(DunnTest, IdenticalGroupsAllOne) {
  const std::vector<std::vector<double>> groups = {{1, 1}, {1, 1}, {1, 1}};
  for (const auto& row : DunnsTest(TableFrom(groups), "T", Metric::kBleu).rows) {
    EXPECT_EQ(row.p, 1.0);
  }
}

TEST(DunnTest, RequiresTwoMethods) {
  EXPECT_THROW(DunnsTest(TableFrom({{1, 2, 3}}), "T", Metric::kBleu), std::invalid_argument);
}

TEST(BestCountsTest, DominantAndTied) {
  const std::vector<std::vector<double>> dominant = {
      {50, 51, 52, 53, 54, 55, 56, 57},
      {1, 2, 3, 4, 5, 6, 7, 8},
      {1.5, 2.5, 3.5, 4.5, 5.5, 6.5, 7.5, 8.5}};
  const auto table = TableFrom(dominant);
  const std::vector<DunnReport> reports = {DunnsTest(table, "T", Metric::kBleu)};
  ASSERT_LT(reports[0].rows[1].p, 0.05);
  ASSERT_LT(reports[0].rows[2].p, 0.05);
  const auto counts = BestCounts(table, reports);
  EXPECT_EQ(counts, (std::vector<std::pair<std::string, int>>{{"m0", 1}, {"m1", 0}, {"m2", 0}}));

  const auto tied = TableFrom({{1, 1}, {1, 1}});
  const std::vector<DunnReport> tied_reports = {DunnsTest(tied, "T", Metric::kBleu)};
  for (const auto& [m, c] : BestCounts(tied, tied_reports)) EXPECT_EQ(c, 1) << m;
}

TEST(ScoreTableTest, CsvRoundTrip) {
  std::istringstream in(
      "task,method,seed,metric,score\n"
      "NE-EN,LMVR,0,BLEU,7.84\n"
      "NE-EN,LMVR,1,bleu,7.9\n"
      "NE-EN,MORSEL,0,CHRF3,28.18\n");
  const auto table = ReadScoreTable(in);
  EXPECT_EQ(table.records().size(), 3u);
  EXPECT_EQ(table.Scores("NE-EN", "LMVR", Metric::kBleu), (std::vector<double>{7.84, 7.9}));
  EXPECT_EQ(table.methods(), (std::vector<std::string>{"LMVR", "MORSEL"}));
  std::ostringstream out;
  WriteScoreTable(table, out);
  std::istringstream again(out.str());
  const auto reread = ReadScoreTable(again);
  EXPECT_EQ(reread.Scores("NE-EN", "MORSEL", Metric::kChrf3), (std::vector<double>{28.18}));
}

TEST(ScoreTableTest, RejectsBadInput) {
  std::istringstream header("a,b,c\n");
  EXPECT_THROW(ReadScoreTable(header), FormatError);
  std::istringstream dup("task,method,seed,metric,score\nT,M,0,BLEU,1\nT,M,0,BLEU,2\n");
  EXPECT_THROW(ReadScoreTable(dup), std::exception);
  std::istringstream metric("task,method,seed,metric,score\nT,M,0,TER,1\n");
  EXPECT_THROW(ReadScoreTable(metric), std::exception);
  std::istringstream number("task,method,seed,metric,score\nT,M,0,BLEU,abc\n");
  EXPECT_THROW(ReadScoreTable(number), FormatError);
}

TEST(ResampleTest, DeterministicAndShaped) {
  const auto cells = testdata::AggregateCells(Metric::kBleu);
  const auto a = ResampleAggregates(cells, 5, 11);
  const auto b = ResampleAggregates(cells, 5, 11);
  ASSERT_EQ(a.records().size(), 32u * 5u);
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    EXPECT_EQ(a.records()[i].score, b.records()[i].score);
  }
  EXPECT_EQ(a.tasks().size(), 8u);
  EXPECT_EQ(a.methods().size(), 4u);
}

TEST(ResampleTest, TableMethodCountsRoughlyMatchPublished) {
  // Subword-NMT is best or tied in most BLEU tasks.
  int total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto table = ResampleAggregates(testdata::AggregateCells(Metric::kBleu), 5, seed);
    std::vector<DunnReport> reports;
    for (const auto& t : table.tasks()) reports.push_back(DunnsTest(table, t, Metric::kBleu));
    for (const auto& [m, c] : BestCounts(table, reports)) {
      if (m == "Subword-NMT") total += c;
    }
  }
  EXPECT_GE(total, 40);
}

TEST(DescriptiveTest, MeanAndSd) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(Mean(v), 2.5);
  EXPECT_NEAR(StdDev(v), std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(StdDev(std::vector<double>{1}), 0.0);
}

}  // namespace
}  // namespace subwordbench::stats
