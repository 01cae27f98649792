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

#include <algorithm>
#include <string>
#include <unordered_map>

#include "subwordbench/corpus.h"
#include "subwordbench/kernels.h"
#include "subwordbench/utf8.h"

namespace subwordbench::kernels {
namespace {

using NgramCounts = std::unordered_map<std::string, std::int64_t>;

NgramCounts CountTokenNgrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  const auto len = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= len; ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key.push_back(' ');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

NgramCounts CountCharNgrams(const std::vector<std::string>& chars, int n) {
  NgramCounts counts;
  const auto len = static_cast<int>(chars.size());
  for (int i = 0; i + n <= len; ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) key += chars[i + j];
    ++counts[key];
  }
  return counts;
}

std::int64_t ClippedMatches(const NgramCounts& hyp, const NgramCounts& ref) {
  std::int64_t matches = 0;
  for (const auto& [gram, count] : hyp) {
    const auto it = ref.find(gram);
    if (it != ref.end()) matches += std::min(count, it->second);
  }
  return matches;
}

}  // namespace

BleuCounts SentenceBleuCounts(const std::string& hyp, const std::string& ref,
                              int max_n) {
  const auto hyp_tokens = SplitWhitespace(hyp);
  const auto ref_tokens = SplitWhitespace(ref);
  BleuCounts counts;
  counts.hyp_length = static_cast<std::int64_t>(hyp_tokens.size());
  counts.ref_length = static_cast<std::int64_t>(ref_tokens.size());
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp_grams = CountTokenNgrams(hyp_tokens, n);
    const auto ref_grams = CountTokenNgrams(ref_tokens, n);
    counts.matches[n - 1] = ClippedMatches(hyp_grams, ref_grams);
    counts.totals[n - 1] = std::max<std::int64_t>(0, counts.hyp_length - n + 1);
  }
  return counts;
}

double SentenceChrf(const std::string& hyp, const std::string& ref, double beta,
                    int max_n) {
  const auto hyp_chars = utf8::SplitChars(hyp);
  const auto ref_chars = utf8::SplitChars(ref);
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp_total = static_cast<std::int64_t>(hyp_chars.size()) - n + 1;
    const auto ref_total = static_cast<std::int64_t>(ref_chars.size()) - n + 1;
    if (hyp_total <= 0 && ref_total <= 0) continue;
    ++orders;
    if (hyp_total <= 0 || ref_total <= 0) continue;  // contributes P = R = 0
    const auto matches = static_cast<double>(ClippedMatches(
        CountCharNgrams(hyp_chars, n), CountCharNgrams(ref_chars, n)));
    precision_sum += matches / static_cast<double>(hyp_total);
    recall_sum += matches / static_cast<double>(ref_total);
  }
  if (orders == 0) return 100.0;  // both sides empty
  const double precision = precision_sum / orders;
  const double recall = recall_sum / orders;
  const double beta2 = beta * beta;
  const double denom = beta2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return 100.0 * (1.0 + beta2) * precision * recall / denom;
}

namespace serial {

PairCounts CountPairs(std::span<const SymbolWord> words) {
  PairCounts counts;
  for (const auto& word : words) {
    for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
      counts[PackPair(word.symbols[i], word.symbols[i + 1])] += word.freq;
    }
  }
  return counts;
}

BleuCounts AccumulateBleu(std::span<const std::string> hyps,
                          std::span<const std::string> refs, int max_n) {
  BleuCounts total;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto c = SentenceBleuCounts(hyps[i], refs[i], max_n);
    for (int n = 0; n < kMaxBleuOrder; ++n) {
      total.matches[n] += c.matches[n];
      total.totals[n] += c.totals[n];
    }
    total.hyp_length += c.hyp_length;
    total.ref_length += c.ref_length;
  }
  return total;
}

std::vector<double> ChrfScores(std::span<const std::string> hyps,
                               std::span<const std::string> refs, double beta,
                               int max_n) {
  std::vector<double> scores(hyps.size());
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    scores[i] = SentenceChrf(hyps[i], refs[i], beta, max_n);
  }
  return scores;
}

}  // namespace serial
}  // namespace subwordbench::kernels
