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

#include <cstdint>

#include "subwordbench/kernels.h"

namespace subwordbench::kernels::omp {

PairCounts CountPairs(std::span<const SymbolWord> words) {
  PairCounts counts;
  const auto n = static_cast<std::int64_t>(words.size());
#pragma omp parallel
  {
    PairCounts local;
#pragma omp for schedule(static) nowait
    for (std::int64_t w = 0; w < n; ++w) {
      const auto& word = words[static_cast<std::size_t>(w)];
      for (std::size_t i = 0; i + 1 < word.symbols.size(); ++i) {
        local[PackPair(word.symbols[i], word.symbols[i + 1])] += word.freq;
      }
    }
#pragma omp critical(subwordbench_count_pairs)
    for (const auto& [key, count] : local) counts[key] += count;
  }
  return counts;
}

BleuCounts AccumulateBleu(std::span<const std::string> hyps,
                          std::span<const std::string> refs, int max_n) {
  BleuCounts total;
  const auto n = static_cast<std::int64_t>(hyps.size());
#pragma omp parallel
  {
    BleuCounts local;
#pragma omp for schedule(dynamic, 256) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto idx = static_cast<std::size_t>(i);
      const auto c = SentenceBleuCounts(hyps[idx], refs[idx], max_n);
      for (int k = 0; k < kMaxBleuOrder; ++k) {
        local.matches[k] += c.matches[k];
        local.totals[k] += c.totals[k];
      }
      local.hyp_length += c.hyp_length;
      local.ref_length += c.ref_length;
    }
#pragma omp critical(subwordbench_bleu)
    {
      for (int k = 0; k < kMaxBleuOrder; ++k) {
        total.matches[k] += local.matches[k];
        total.totals[k] += local.totals[k];
      }
      total.hyp_length += local.hyp_length;
      total.ref_length += local.ref_length;
    }
  }
  return total;
}

std::vector<double> ChrfScores(std::span<const std::string> hyps,
                               std::span<const std::string> refs, double beta,
                               int max_n) {
  std::vector<double> scores(hyps.size());
  const auto n = static_cast<std::int64_t>(hyps.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    scores[idx] = SentenceChrf(hyps[idx], refs[idx], beta, max_n);
  }
  return scores;
}

}  // namespace subwordbench::kernels::omp
