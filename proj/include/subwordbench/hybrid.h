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

#ifndef SUBWORDBENCH_HYBRID_H_
#define SUBWORDBENCH_HYBRID_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "subwordbench/bpe.h"
#include "subwordbench/corpus.h"

namespace subwordbench::hybrid {

inline constexpr std::int64_t kDefaultVocabBudget = 2500;

// Stem BPE plus '+'-marked suffixes. Invariant:
//   |stem_bpe.Vocabulary()| + |suffixes| < vocab_budget.
class HybridModel {
 public:
  HybridModel(bpe::BpeModel stem_bpe, std::set<std::string> suffixes,
              AnalysisTable analyses, std::int64_t vocab_budget);

  const bpe::BpeModel& stem_bpe() const { return stem_bpe_; }
  const std::set<std::string>& suffixes() const { return suffixes_; }
  const AnalysisTable& analyses() const { return analyses_; }
  std::int64_t vocab_budget() const { return vocab_budget_; }

  // Stem pieces plus suffix pieces this model can emit.
  std::size_t ProducibleSymbolCount() const;

  // Analyzed words: stem pieces ("@@" on all but the last) followed by one
  // "+suffix" piece per suffix. Other words: stem BPE pieces only. Throws
  // std::invalid_argument for words starting with '+'.
  std::vector<std::string> Segment(std::string_view word) const;
  std::vector<std::string> Apply(std::string_view text) const;

 private:
  bpe::BpeModel stem_bpe_;
  std::set<std::string> suffixes_;
  AnalysisTable analyses_;
  std::int64_t vocab_budget_;
};

// Trains BPE on stems (analyzed words contribute their stem, unanalyzed words
// themselves, weighted by word frequency) and keeps the largest merge prefix
// that satisfies the budget. Throws std::invalid_argument if even zero merges
// cannot fit.
HybridModel BuildHybrid(const AnalysisTable& analyses, const FrequencyTable& freq,
                        std::int64_t vocab_budget = kDefaultVocabBudget,
                        std::uint64_t seed = 0);

// Inverse over a sentence's pieces; words are joined by single spaces. A
// '+' piece directly after an "@@" piece continues the stem. Throws
// FormatError on a trailing "@@" or a leading '+' piece.
std::string Detokenize(std::span<const std::string> pieces);
// Single-word inverse; additionally rejects sequences that span more than one
// word (e.g. a '+' piece followed by an "@@" piece).
std::string DetokenizeWord(std::span<const std::string> pieces);

// Suffix induction used when no external analyses are available. A suffix
// (1-5 code points) is a candidate when at least two words w = stem + suffix
// have `stem` also in the table; candidates rank by that pair count, then by
// summed word frequency, then lexicographically. Each word is analyzed with
// its longest applicable suffix whose stem occurs in the table.
AnalysisTable LearnFallbackAnalyzer(const FrequencyTable& freq,
                                    std::int64_t max_suffixes);

// `#subwordbench-hybrid v1 budget=<N>`, the stem BPE model block, then
// `#suffixes` (one per line) and `#analyses` (analysis-file lines).
void WriteModel(const HybridModel& model, std::ostream& out);
HybridModel ReadModel(std::istream& in);
void SaveModel(const HybridModel& model, const std::string& path);
HybridModel LoadModel(const std::string& path);

}  // namespace subwordbench::hybrid

#endif  // SUBWORDBENCH_HYBRID_H_
