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

#include <random>

#include "subwordbench/kernels.h"

namespace subwordbench::kernels {
namespace {

std::vector<SymbolWord> RandomWords(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<SymbolWord> words(n);
  for (auto& w : words) {
    w.freq = static_cast<std::int64_t>(1 + rng() % 50);
    w.symbols.resize(1 + rng() % 12);
    for (auto& s : w.symbols) s = static_cast<std::int32_t>(rng() % 20);
  }
  return words;
}

std::vector<std::string> RandomLines(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> lines(n);
  for (auto& line : lines) {
    const int words = static_cast<int>(rng() % 15);
    for (int i = 0; i < words; ++i) {
      if (i) line += ' ';
      line += std::string(1 + rng() % 3, static_cast<char>('a' + rng() % 5));
    }
  }
  return lines;
}

TEST(KernelsTest, PairCountsAgree) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto words = RandomWords(seed, 5000);
    EXPECT_EQ(serial::CountPairs(words), omp::CountPairs(words));
  }
  EXPECT_TRUE(omp::CountPairs({}).empty());
}

TEST(KernelsTest, OverlappingPairsAreCounted) {
  const std::vector<SymbolWord> words = {{{1, 1, 1}, 2}};
  const auto counts = serial::CountPairs(words);
  EXPECT_EQ(counts.at(PackPair(1, 1)), 4);
}

TEST(KernelsTest, BleuCountsAgree) {
  const auto hyps = RandomLines(4, 3000);
  const auto refs = RandomLines(5, 3000);
  EXPECT_EQ(serial::AccumulateBleu(hyps, refs, 4), omp::AccumulateBleu(hyps, refs, 4));
}

TEST(KernelsTest, ChrfScoresAgree) {
  const auto hyps = RandomLines(6, 2000);
  const auto refs = RandomLines(7, 2000);
  EXPECT_EQ(serial::ChrfScores(hyps, refs, 3.0, 6), omp::ChrfScores(hyps, refs, 3.0, 6));
}

TEST(KernelsTest, MapPreservesOrder) {
  std::vector<int> items(1000);
  for (int i = 0; i < 1000; ++i) items[i] = i;
  const auto square = [](const int& x) { return x * x; };
  EXPECT_EQ(serial::Map(std::span<const int>(items), square),
            omp::Map(std::span<const int>(items), square));
}

TEST(KernelsTest, PairPacking) {
  const auto key = PackPair(-1, 7);
  EXPECT_EQ(PairLeft(key), -1);
  EXPECT_EQ(PairRight(key), 7);
}

}  // namespace
}  // namespace subwordbench::kernels
