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

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.h"
#include "subwordbench/metrics.h"

namespace subwordbench::metrics {
namespace {

EvalPair Pair(std::vector<std::string> hyps, std::vector<std::string> refs) {
  return {std::move(hyps), std::move(refs)};
}

std::string RandomSentence(std::mt19937_64& rng, int max_words) {
  static const char* kWords[] = {"the", "cat", "sat", "on", "a", "mat", "dog", "dogs", "ran"};
  std::string s;
  const int n = 1 + static_cast<int>(rng() % max_words);
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += kWords[rng() % 9];
  }
  return s;
}

TEST(BleuTest, IdentityScoresHundred) {
  const auto p = Pair({"the cat sat", "on the mat today ok"}, {"the cat sat", "on the mat today ok"});
  EXPECT_DOUBLE_EQ(CorpusBleu(p), 100.0);
}

TEST(BleuTest, NoMatchScoresZero) {
  EXPECT_EQ(CorpusBleu(Pair({"dogs"}, {"dog"})), 0.0);
}

TEST(BleuTest, HandComputedCase) {
  // p_n = 5/6, 3/5, 2/4, 1/3 and no brevity penalty.
  const double expected = 100.0 * std::pow(5.0 / 6 * 3.0 / 5 * 2.0 / 4 * 1.0 / 3, 0.25);
  const auto p = Pair({"the cat sat on the mat"}, {"the cat sat on a mat"});
  EXPECT_NEAR(CorpusBleu(p), expected, 1e-9);
  EXPECT_NEAR(expected, 53.728496591177, 1e-9);
}

TEST(BleuTest, BrevityPenalty) {
  const auto p = Pair({"a b c d"}, {"a b c d e f"});
  EXPECT_NEAR(CorpusBleu(p), 100.0 * std::exp(1.0 - 6.0 / 4.0), 1e-9);
}

TEST(BleuTest, LowercaseInvariance) {
  const auto lower = Pair({"the cat sat on the mat"}, {"the cat sat on a mat"});
  const auto mixed = Pair({"The CAT sat on the Mat"}, {"the cat SAT on a mat"});
  EXPECT_DOUBLE_EQ(CorpusBleu(lower), CorpusBleu(mixed));
  EXPECT_LT(CorpusBleu(mixed, 4, false), CorpusBleu(mixed));
}

TEST(BleuTest, MatchesOracleOnRandomCorpora) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> hyps;
    std::vector<std::string> refs;
    for (int i = 0; i < 20; ++i) {
      hyps.push_back(RandomSentence(rng, 12));
      refs.push_back(RandomSentence(rng, 12));
    }
    EXPECT_NEAR(CorpusBleu(Pair(hyps, refs)), oracle::Bleu(hyps, refs), 1e-9);
    EXPECT_NEAR(CorpusBleu(Pair(hyps, refs), 2), oracle::Bleu(hyps, refs, 2), 1e-9);
  }
}

TEST(BleuTest, RejectsBadInput) {
  EXPECT_THROW(CorpusBleu(Pair({}, {})), std::invalid_argument);
  EXPECT_THROW(CorpusBleu(Pair({"a"}, {"a", "b"})), std::invalid_argument);
}

TEST(ChrfTest, IdentityAndPartialMatch) {
  EXPECT_DOUBLE_EQ(Chrf(Pair({"the cat"}, {"the cat"})), 100.0);
  EXPECT_DOUBLE_EQ(Chrf(Pair({"ab"}, {"ab"}), 3.0, 2), 100.0);
  const double partial = Chrf(Pair({"dogs"}, {"dog"}));
  EXPECT_GT(partial, 0.0);
  EXPECT_LT(partial, 100.0);
  // P averages 3/4, 2/3, 1/2, 0 over four orders; R averages 1 over three.
  const double p = (3.0 / 4 + 2.0 / 3 + 1.0 / 2 + 0.0) / 4;
  const double r = (1.0 + 1.0 + 1.0) / 4;
  EXPECT_NEAR(partial, 100.0 * 10 * p * r / (9 * p + r), 1e-9);
}

TEST(ChrfTest, DisjointAlphabetScoresZero) {
  EXPECT_DOUBLE_EQ(Chrf(Pair({"abc"}, {"xyz"})), 0.0);
}

TEST(ChrfTest, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> hyps;
    std::vector<std::string> refs;
    for (int i = 0; i < 10; ++i) {
      hyps.push_back(RandomSentence(rng, 6));
      refs.push_back(RandomSentence(rng, 6));
    }
    EXPECT_NEAR(Chrf(Pair(hyps, refs)), oracle::Chrf(hyps, refs), 1e-9);
  }
  EXPECT_NEAR(Chrf(Pair({"  the   cat "}, {"the cat"})), 100.0, 1e-12);
  EXPECT_NEAR(Chrf(Pair({"\xD2\x9B\xD0\xB0\xD0\xB7"}, {"\xD2\x9A\xD0\xB0"})),
              oracle::SentenceChrf("\xD2\x9B\xD0\xB0\xD0\xB7", "\xD2\x9B\xD0\xB0"), 1e-9);
}

TEST(ChrfTest, RecallWeighsMoreThanPrecision) {
  // For beta = 3 the partial derivative in R exceeds the one in P.
  const auto f = [](double p, double r) { return 10 * p * r / (9 * p + r); };
  for (double p = 0.1; p < 1.0; p += 0.1) {
    for (double r = 0.1; r < 1.0; r += 0.1) {
      const double h = 1e-3;
      const double dp = f(p + h, r) - f(p, r);
      const double dr = f(p, r + h) - f(p, r);
      if (r < 3 * p) EXPECT_LT(dp, dr) << p << " " << r;
    }
  }
  // Same effect through the metric: a recall gap costs more than a precision gap.
  const double missing = Chrf(Pair({"abcd"}, {"abcdef"}));
  const double extra = Chrf(Pair({"abcdef"}, {"abcd"}));
  EXPECT_LT(missing, extra);
}

TEST(MetricsTest, PermutationInvariance) {
  std::vector<std::string> hyps = {"the cat sat", "a dog ran on", "mat the the"};
  std::vector<std::string> refs = {"the cat sat on", "a dog ran", "the mat"};
  const double bleu = CorpusBleu(Pair(hyps, refs), 2);
  const double chrf = Chrf(Pair(hyps, refs));
  std::swap(hyps[0], hyps[2]);
  std::swap(refs[0], refs[2]);
  EXPECT_NEAR(CorpusBleu(Pair(hyps, refs), 2), bleu, 1e-12);
  EXPECT_NEAR(Chrf(Pair(hyps, refs)), chrf, 1e-12);
}

TEST(MetricsTest, NormalizeWhitespace) {
  EXPECT_EQ(NormalizeWhitespace("  a \t b  "), "a b");
  EXPECT_EQ(NormalizeWhitespace(""), "");
}

}  // namespace
}  // namespace subwordbench::metrics
